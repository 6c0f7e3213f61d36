#pragma once

#include <optional>
#include <string>

#include "obsv/config.hpp"

namespace obsv::cli {

inline constexpr const char* kVersion = "0.1.0";

// exit codes shared by all subcommands
inline constexpr int kOk = 0;
inline constexpr int kCertificationFailure = 2;
inline constexpr int kAuditFailure = 3;
inline constexpr int kConfigError = 4;

int cmd_certify_de(const ExperimentConfig& cfg, const std::string& out_dir);
int cmd_certify_ucp(const ExperimentConfig& cfg, const std::string& out_dir);
int cmd_constants(const ExperimentConfig& cfg,
                  const std::optional<std::string>& de_path,
                  const std::optional<std::string>& ucp_path,
                  const std::string& out_dir);
int cmd_density_seq(const ExperimentConfig& cfg, const std::string& out_dir);
int cmd_verify(const ExperimentConfig& cfg,
               const std::optional<std::string>& de_path,
               const std::optional<std::string>& ucp_path,
               const std::string& out_dir, bool diagnostic);
int cmd_report(const std::string& report_path);

}  // namespace obsv::cli
