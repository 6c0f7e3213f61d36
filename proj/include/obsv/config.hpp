#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "obsv/constants.hpp"
#include "obsv/evolution.hpp"
#include "obsv/grid.hpp"
#include "obsv/observation.hpp"
#include "obsv/symbol.hpp"
#include "obsv/time_set.hpp"

#include <json.hpp>

namespace obsv {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SymbolSpec {
  std::string preset;  // "heat" | "modulated" | "" (explicit terms)
  double diffusivity = 1.0;
  int degree = 2;
  std::vector<double> mesh;
  std::vector<double> theta;
  EllipticSymbol explicit_symbol;  // used when preset is empty
};

struct SensorSpec {
  std::string preset;  // full | empty | stripes | switching_halves |
                       // stripes_on_time_set | explicit
  double period = 0.0;
  double fill = 0.5;
  std::vector<double> mesh;
  std::vector<std::vector<Box>> pieces;
};

struct TimeSetSpec {
  std::string kind;  // full | intervals | fat_cantor
  std::vector<Interval> intervals;
  int depth = 6;
  std::vector<double> schedule;  // empty = geometric 4^{-k}
};

struct UcpOptions {
  UcpMethod method = UcpMethod::automatic;
  double d1_min = 0.05;
  double gamma1 = 1.0;
};

struct ExperimentConfig {
  int schema = 1;
  std::uint64_t seed = 0;
  GridSpace grid;
  double horizon = 1.0;
  SymbolSpec symbol;
  SensorSpec sensors;
  TimeSetSpec time_set;
  SpectralProjector::Mode projector_mode = SpectralProjector::Mode::sharp;
  double projector_width = 0.0;
  std::vector<double> lambda_grid;
  std::vector<double> time_grid;
  int trials = 10;
  FactorMode mode = FactorMode::general;
  std::vector<double> r_list;
  int depth = 8;
  int batch = 20;
  std::optional<double> ell;
  std::optional<double> ell1;
  UcpOptions ucp;
  double quad_tol = 1e-8;
  bool record_timings = false;
  double extra_c2 = 0.0;

  std::string config_hash;  // hex FNV-1a of the canonical document
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

// FNV-1a 64 over the canonical dump, as fixed-width hex
std::string hash_of(const nlohmann::json& doc);

EllipticSymbol build_symbol(const ExperimentConfig& cfg);
SensorFamily build_sensors(const ExperimentConfig& cfg);
TimeSet build_time_set(const ExperimentConfig& cfg);

}  // namespace obsv
