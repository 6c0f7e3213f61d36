#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "obsv/cli.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config (JSON)")
      ->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option_function<std::uint64_t>(
      "--seed",
      [&args](const std::uint64_t& s) { args.seed_override = s; },
      "override the config seed");
}

obsv::ExperimentConfig load(const CommonArgs& args) {
  auto cfg = obsv::load_config(args.config_path);
  if (args.seed_override) cfg.seed = *args.seed_override;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"observability certification and audit runner"};
  app.require_subcommand(1);

  CommonArgs de_args, ucp_args, const_args, seq_args, verify_args;
  std::optional<std::string> de_path, ucp_path;
  std::string run_path;
  std::string verify_mode = "certify";

  auto* de = app.add_subcommand("certify-de", "certify the dissipation estimate");
  add_common(de, de_args);
  auto* ucp = app.add_subcommand("certify-ucp", "certify the uncertainty principle");
  add_common(ucp, ucp_args);
  auto* cst = app.add_subcommand("constants", "evaluate the constants chain");
  add_common(cst, const_args);
  cst->add_option("--de", de_path, "dissipation certificate JSON");
  cst->add_option("--ucp", ucp_path, "uncertainty certificate JSON");
  auto* seq = app.add_subcommand("density-seq", "build the density-point sequence");
  add_common(seq, seq_args);
  auto* ver = app.add_subcommand("verify", "run the full audit chain");
  add_common(ver, verify_args);
  ver->add_option("--de", de_path, "dissipation certificate JSON");
  ver->add_option("--ucp", ucp_path, "uncertainty certificate JSON");
  ver->add_option("--mode", verify_mode, "certify|diagnostic")
      ->check(CLI::IsMember({"certify", "diagnostic"}));
  auto* rep = app.add_subcommand("report", "print a stored run report");
  rep->add_option("--run", run_path, "run_report.json path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (de->parsed()) return obsv::cli::cmd_certify_de(load(de_args), de_args.out_dir);
    if (ucp->parsed()) return obsv::cli::cmd_certify_ucp(load(ucp_args), ucp_args.out_dir);
    if (cst->parsed()) {
      return obsv::cli::cmd_constants(load(const_args), de_path, ucp_path,
                                      const_args.out_dir);
    }
    if (seq->parsed()) return obsv::cli::cmd_density_seq(load(seq_args), seq_args.out_dir);
    if (ver->parsed()) {
      return obsv::cli::cmd_verify(load(verify_args), de_path, ucp_path,
                                   verify_args.out_dir,
                                   verify_mode == "diagnostic");
    }
    if (rep->parsed()) return obsv::cli::cmd_report(run_path);
  } catch (const obsv::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return obsv::cli::kConfigError;
  }
  return obsv::cli::kConfigError;
}
