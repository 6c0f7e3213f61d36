#include "obsv/config.hpp"

#include <fstream>

namespace obsv {

namespace {

using nlohmann::json;

double parse_exponent(const json& v, const char* what) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "Inf" || s == "infinity") return kInf;
    throw ConfigError(std::string(what) + ": unknown exponent '" + s + "'");
  }
  if (!v.is_number()) throw ConfigError(std::string(what) + ": expected number");
  return v.get<double>();
}

cplx parse_complex(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw ConfigError("symbol coefficient: expected number or [re, im]");
}

}  // namespace

std::string hash_of(const nlohmann::json& doc) {
  const std::string dump = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) h = (h ^ c) * 0x100000001b3ULL;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(const nlohmann::json& doc) {
  ExperimentConfig cfg;
  try {
    if (doc.value("schema", 0) != 1) {
      throw ConfigError("config: schema field must be 1");
    }
    if (!doc.contains("seed")) throw ConfigError("config: seed is mandatory");
    cfg.seed = doc.at("seed").get<std::uint64_t>();

    const auto& grid = doc.at("grid");
    cfg.grid.dim = grid.value("d", 1);
    cfg.grid.n = grid.value("N", 256);
    cfg.grid.p = grid.contains("p") ? parse_exponent(grid.at("p"), "grid.p") : 2.0;
    cfg.grid.validate();

    cfg.horizon = doc.value("horizon", 1.0);
    if (!(cfg.horizon > 0.0)) throw ConfigError("config: horizon must be positive");

    const auto& sym = doc.at("symbol");
    if (sym.contains("preset")) {
      cfg.symbol.preset = sym.at("preset").get<std::string>();
      cfg.symbol.diffusivity = sym.value("diffusivity", 1.0);
      if (cfg.symbol.preset == "modulated") {
        cfg.symbol.degree = sym.value("degree", 2);
        cfg.symbol.mesh = sym.at("mesh").get<std::vector<double>>();
        cfg.symbol.theta = sym.at("theta").get<std::vector<double>>();
      }
    } else {
      EllipticSymbol s;
      s.dim = cfg.grid.dim;
      s.degree = sym.at("degree").get<int>();
      s.mesh = sym.at("mesh").get<std::vector<double>>();
      s.ellipticity = sym.value("ellipticity", 0.0);
      for (const auto& term : sym.at("terms")) {
        EllipticSymbol::Term t;
        const auto alpha = term.at("alpha").get<std::vector<int>>();
        t.alpha = {alpha.at(0), alpha.size() > 1 ? alpha.at(1) : 0};
        for (const auto& v : term.at("values")) t.values.push_back(parse_complex(v));
        s.terms.push_back(std::move(t));
      }
      cfg.symbol.explicit_symbol = std::move(s);
    }

    const auto& sen = doc.at("sensors");
    cfg.sensors.preset = sen.value("preset", "explicit");
    cfg.sensors.period = sen.value("period", 0.0);
    cfg.sensors.fill = sen.value("fill", 0.5);
    if (cfg.sensors.preset == "explicit") {
      cfg.sensors.mesh = sen.at("mesh").get<std::vector<double>>();
      for (const auto& piece : sen.at("pieces")) {
        std::vector<Box> boxes;
        for (const auto& b : piece) {
          Box box;
          const auto lo = b.at("lo").get<std::vector<double>>();
          const auto hi = b.at("hi").get<std::vector<double>>();
          box.lo = {lo.at(0), lo.size() > 1 ? lo.at(1) : 0.0};
          box.hi = {hi.at(0), hi.size() > 1 ? hi.at(1) : 0.0};
          boxes.push_back(box);
        }
        cfg.sensors.pieces.push_back(std::move(boxes));
      }
    }

    const auto& ts = doc.at("time_set");
    cfg.time_set.kind = ts.at("kind").get<std::string>();
    if (cfg.time_set.kind == "intervals") {
      for (const auto& iv : ts.at("intervals")) {
        cfg.time_set.intervals.push_back({iv.at(0).get<double>(),
                                          iv.at(1).get<double>()});
      }
    } else if (cfg.time_set.kind == "fat_cantor") {
      cfg.time_set.depth = ts.value("depth", 6);
      if (ts.contains("schedule") && ts.at("schedule").is_array()) {
        cfg.time_set.schedule = ts.at("schedule").get<std::vector<double>>();
      }
    } else if (cfg.time_set.kind != "full") {
      throw ConfigError("config: time_set.kind must be full|intervals|fat_cantor");
    }

    if (doc.contains("projector")) {
      const auto& pr = doc.at("projector");
      const auto mode = pr.value("mode", "sharp");
      if (mode == "sharp") {
        cfg.projector_mode = SpectralProjector::Mode::sharp;
      } else if (mode == "smoothed") {
        cfg.projector_mode = SpectralProjector::Mode::smoothed;
      } else {
        throw ConfigError("config: projector.mode must be sharp|smoothed");
      }
      cfg.projector_width = pr.value("width", 0.0);
    }

    cfg.lambda_grid = doc.value("lambda_grid", std::vector<double>{2, 4, 8, 16});
    if (doc.contains("time_grid")) {
      cfg.time_grid = doc.at("time_grid").get<std::vector<double>>();
    } else {
      for (int i = 0; i <= 8; ++i) cfg.time_grid.push_back(cfg.horizon * i / 8.0);
    }
    cfg.trials = doc.value("trials", 10);
    cfg.batch = doc.value("batch", 20);
    cfg.depth = doc.value("depth", 8);

    const auto mode = doc.value("mode", "general");
    if (mode == "general") {
      cfg.mode = FactorMode::general;
    } else if (mode == "full_interval") {
      cfg.mode = FactorMode::full_interval;
    } else {
      throw ConfigError("config: mode must be general|full_interval");
    }

    if (doc.contains("r_list")) {
      for (const auto& r : doc.at("r_list")) {
        cfg.r_list.push_back(parse_exponent(r, "r_list"));
      }
    } else {
      cfg.r_list = {1.0};
    }
    for (double r : cfg.r_list) {
      if (!(r >= 1.0)) throw ConfigError("config: r values must satisfy r >= 1");
    }

    if (doc.contains("ell")) cfg.ell = doc.at("ell").get<double>();
    if (doc.contains("ell1")) cfg.ell1 = doc.at("ell1").get<double>();

    if (doc.contains("ucp")) {
      const auto& u = doc.at("ucp");
      const auto method = u.value("method", "auto");
      if (method == "auto") {
        cfg.ucp.method = UcpMethod::automatic;
      } else if (method == "sample") {
        cfg.ucp.method = UcpMethod::sample;
      } else if (method == "exact_p2") {
        cfg.ucp.method = UcpMethod::exact_p2;
      } else {
        throw ConfigError("config: ucp.method must be auto|sample|exact_p2");
      }
      cfg.ucp.d1_min = u.value("d1_min", 0.05);
      cfg.ucp.gamma1 = u.value("gamma1", 1.0);
    }

    cfg.quad_tol = doc.value("quad_tol", 1e-8);
    cfg.record_timings = doc.value("record_timings", false);
    cfg.extra_c2 = doc.value("extra_c2", 0.0);

    // full-interval mode needs an interval inside E; checked where ell/ell1
    // are resolved, but reject the obvious mismatch here
    if (cfg.mode == FactorMode::full_interval &&
        cfg.time_set.kind == "fat_cantor") {
      throw ConfigError(
          "config: full_interval mode requires an interval contained in E");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.config_hash = hash_of(doc);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  return parse_config(doc);
}

EllipticSymbol build_symbol(const ExperimentConfig& cfg) {
  if (cfg.symbol.preset == "heat") {
    return heat_symbol(cfg.horizon, cfg.symbol.diffusivity);
  }
  if (cfg.symbol.preset == "modulated") {
    return modulated_symbol(cfg.horizon, cfg.symbol.degree, cfg.symbol.mesh,
                            cfg.symbol.theta);
  }
  if (!cfg.symbol.preset.empty()) {
    throw ConfigError("config: unknown symbol preset '" + cfg.symbol.preset + "'");
  }
  return cfg.symbol.explicit_symbol;
}

SensorFamily build_sensors(const ExperimentConfig& cfg) {
  const int dim = cfg.grid.dim;
  const auto& s = cfg.sensors;
  if (s.preset == "full") return SensorFamily::full(cfg.horizon, dim);
  if (s.preset == "empty") return SensorFamily::empty(cfg.horizon, dim);
  if (s.preset == "stripes") {
    return SensorFamily::stripes(cfg.horizon, dim, s.period, s.fill);
  }
  if (s.preset == "switching_halves") {
    return SensorFamily::switching_halves(cfg.horizon, dim);
  }
  if (s.preset == "stripes_on_time_set") {
    return SensorFamily::stripes_on(build_time_set(cfg), dim, s.period, s.fill);
  }
  if (s.preset == "explicit") {
    return SensorFamily(cfg.horizon, s.mesh, s.pieces, dim);
  }
  throw ConfigError("config: unknown sensors preset '" + s.preset + "'");
}

TimeSet build_time_set(const ExperimentConfig& cfg) {
  const auto& t = cfg.time_set;
  if (t.kind == "full") return TimeSet::full(cfg.horizon);
  if (t.kind == "intervals") return TimeSet(cfg.horizon, t.intervals);
  const auto schedule = t.schedule.empty()
                            ? geometric_schedule(t.depth)
                            : t.schedule;
  return fat_cantor(cfg.horizon, t.depth, schedule);
}

}  // namespace obsv
