#include "obsv/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "obsv/pipeline.hpp"
#include "obsv/rng.hpp"

namespace obsv::cli {

namespace {

using nlohmann::json;

json grid_json(const GridSpace& g) {
  json j;
  j["d"] = g.dim;
  j["N"] = g.n;
  if (std::isinf(g.p)) {
    j["p"] = "inf";
  } else {
    j["p"] = g.p;
  }
  return j;
}

json exponent_json(double r) {
  if (std::isinf(r)) return json("inf");
  return json(r);
}

std::string exponent_label(double r) {
  if (std::isinf(r)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", r);
  return buf;
}

void write_text(const std::string& path, const std::string& body) {
  std::filesystem::create_directories(
      std::filesystem::path(path).parent_path().empty()
          ? "."
          : std::filesystem::path(path).parent_path().string());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << body;
}

void write_json(const std::string& path, const json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("parse error in ") + path + ": " + e.what());
  }
  return doc;
}

void check_lineage(const json& cert, const ExperimentConfig& cfg,
                   const char* kind) {
  const auto grid = cert.value("grid", json::object());
  const bool grid_ok =
      grid.value("d", -1) == cfg.grid.dim && grid.value("N", -1) == cfg.grid.n;
  const bool seed_ok = cert.value("seed", std::uint64_t{0}) == cfg.seed;
  if (!grid_ok || !seed_ok) {
    throw ConfigError(std::string(kind) +
                      " certificate does not match the config grid/seed lineage");
  }
}

struct DeOutcome {
  DeCertificate de;
  ExpBound exp;
};

DeOutcome run_de(const ExperimentConfig& cfg, const EvolutionFamily& fam) {
  SpectralProjector pr;
  pr.mode = cfg.projector_mode;
  pr.width = cfg.projector_width;
  DeOutcome out;
  out.de = certify_de(fam, pr, cfg.lambda_grid, cfg.time_grid, cfg.trials,
                      cfg.seed);
  out.exp = estimate_exp_bound(fam, cfg.time_grid, cfg.trials, cfg.seed);
  return out;
}

json de_json(const ExperimentConfig& cfg, const DeOutcome& out) {
  json j;
  j["schema"] = 1;
  j["kind"] = "de_certificate";
  j["config_hash"] = cfg.config_hash;
  j["seed"] = cfg.seed;
  j["grid"] = grid_json(cfg.grid);
  j["d2"] = out.de.d2;
  j["d3"] = out.de.d3;
  j["gamma2"] = out.de.gamma2;
  j["gamma3"] = out.de.gamma3;
  j["gamma4"] = out.de.gamma4;
  j["M"] = out.exp.M;
  j["omega"] = out.exp.omega;
  j["provenance"] = out.de.provenance;
  j["samples"] = out.de.samples;
  j["worst_violation"] = out.de.worst_violation;
  j["pass"] = out.de.pass;
  if (!out.de.failure.empty()) j["failure"] = out.de.failure;
  return j;
}

json ucp_json(const ExperimentConfig& cfg, const UcpCertificate& cert) {
  json j;
  j["schema"] = 1;
  j["kind"] = "ucp_certificate";
  j["config_hash"] = cfg.config_hash;
  j["seed"] = cfg.seed;
  j["grid"] = grid_json(cfg.grid);
  j["d0"] = cert.d0;
  j["d1"] = cert.d1;
  j["gamma1"] = cert.gamma1;
  j["method"] = cert.method;
  j["lambda_grid"] = cert.lambda_grid;
  j["lambda_max"] = cert.lambda_max;
  j["samples"] = cert.samples;
  j["worst_residual"] = cert.worst_residual;
  j["pass"] = cert.pass;
  if (!cert.failure.empty()) j["failure"] = cert.failure;
  return j;
}

struct Geometry {
  double ell = 0.0;
  double ell1 = 0.0;
  double theta0 = 0.0;
  double delta1 = 0.0;
};

Geometry resolve_geometry(const ExperimentConfig& cfg, const TimeSet& E,
                          double q) {
  Geometry geo;
  if (cfg.ell) {
    geo.ell = *cfg.ell;
  } else {
    const auto dp = find_density_point(E, q);
    if (!dp) {
      throw CertificateError(0, "no certified right density point found");
    }
    geo.ell = dp->ell;
  }
  try {
    geo.theta0 = find_theta0(E, geo.ell, q);
  } catch (const std::domain_error&) {
    geo.theta0 = 0.0;  // user-supplied ell may certify per step regardless
  }
  if (cfg.ell1) {
    geo.ell1 = *cfg.ell1;
  } else {
    if (geo.theta0 <= 0.0) {
      throw CertificateError(0, "ell is not a certified density point");
    }
    geo.ell1 = std::min(geo.ell + 0.99 * geo.theta0, E.horizon());
  }
  if (!(geo.ell < geo.ell1 && geo.ell1 <= E.horizon())) {
    throw ConfigError("geometry: need ell < ell1 <= T");
  }
  geo.delta1 = (1.0 - q) * (geo.ell1 - geo.ell);
  return geo;
}

ConstantBundle assemble_bundle(const ExperimentConfig& cfg, const json& de,
                               const json& ucp, const SensorFamily& sensors,
                               const TimeSet& E) {
  ConstantBundle b;
  b.d0 = ucp.at("d0").get<double>();
  b.d1 = ucp.at("d1").get<double>();
  b.gamma1 = ucp.at("gamma1").get<double>();
  b.d2 = de.at("d2").get<double>();
  b.d3 = de.at("d3").get<double>();
  b.gamma2 = de.at("gamma2").get<double>();
  b.gamma3 = de.at("gamma3").get<double>();
  b.gamma4 = de.at("gamma4").get<double>();
  b.M = de.at("M").get<double>();
  b.omega = de.at("omega").get<double>();
  b.C_sup = sensors.csup(cfg.grid, E);
  b.extra_c2 = cfg.extra_c2;
  b.validate();
  return b;
}

json bundle_json(const ConstantBundle& b) {
  json j;
  j["d0"] = b.d0;
  j["d1"] = b.d1;
  j["gamma1"] = b.gamma1;
  j["d2"] = b.d2;
  j["d3"] = b.d3;
  j["gamma2"] = b.gamma2;
  j["gamma3"] = b.gamma3;
  j["gamma4"] = b.gamma4;
  j["M"] = b.M;
  j["omega"] = b.omega;
  j["C_E_inf"] = b.C_sup;
  if (b.extra_c2 > 0.0) j["extra_c2"] = b.extra_c2;
  return j;
}

json certificate_json(const ObservabilityCertificate& cert,
                      const Geometry& geo) {
  json j;
  j["kappa"] = cert.kappa;
  j["q"] = cert.q;
  j["c1"] = cert.c1;
  j["c2"] = cert.c2;
  j["c3"] = cert.c3;
  j["c4"] = cert.c4;
  j["delta1"] = cert.delta1;
  j["ell"] = geo.ell;
  j["ell1"] = geo.ell1;
  j["theta0"] = geo.theta0;
  j["eps"] = cert.eps;
  j["C_obs"] = cert.C_obs;
  j["C1"] = cert.C1;
  j["C2"] = cert.C2;
  j["C3"] = cert.C3;
  j["mode"] = cert.mode == FactorMode::full_interval ? "full_interval"
                                                     : "general";
  j["overflow"] = cert.overflow;
  if (cert.extra_c2_used) j["extra_c2_used"] = true;
  return j;
}

std::string csv_row(std::initializer_list<double> values) {
  std::string row;
  char buf[40];
  for (double v : values) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    if (!row.empty()) row += ',';
    row += buf;
  }
  return row + "\n";
}

}  // namespace

int cmd_certify_de(const ExperimentConfig& cfg, const std::string& out_dir) {
  try {
    EvolutionFamily fam(build_symbol(cfg), cfg.grid);
    const auto out = run_de(cfg, fam);
    write_json(out_dir + "/de_certificate.json", de_json(cfg, out));
    if (!out.de.pass) {
      std::cerr << "dissipation certification failed: " << out.de.failure
                << "\n";
      return kCertificationFailure;
    }
    std::cout << "de certificate: d2=" << out.de.d2 << " d3=" << out.de.d3
              << " gamma2=" << out.de.gamma2 << " (" << out.de.provenance
              << "), M=" << out.exp.M << " omega=" << out.exp.omega << "\n";
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "certification failed: " << e.what() << "\n";
    return kCertificationFailure;
  }
}

int cmd_certify_ucp(const ExperimentConfig& cfg, const std::string& out_dir) {
  try {
    const auto E = build_time_set(cfg);
    const auto sensors = build_sensors(cfg);
    const auto cert =
        certify_ucp(sensors, E, cfg.grid, cfg.lambda_grid, cfg.trials,
                    cfg.ucp.gamma1, cfg.ucp.d1_min, cfg.seed, cfg.ucp.method);
    write_json(out_dir + "/ucp_certificate.json", ucp_json(cfg, cert));
    if (!cert.pass) {
      std::cerr << "uncertainty certification failed: " << cert.failure << "\n";
      return kCertificationFailure;
    }
    std::cout << "ucp certificate: d0=" << cert.d0 << " d1=" << cert.d1
              << " gamma1=" << cert.gamma1 << " (" << cert.method << ")\n";
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "certification failed: " << e.what() << "\n";
    return kCertificationFailure;
  }
}

int cmd_constants(const ExperimentConfig& cfg,
                  const std::optional<std::string>& de_path,
                  const std::optional<std::string>& ucp_path,
                  const std::string& out_dir) {
  try {
    EvolutionFamily fam(build_symbol(cfg), cfg.grid);
    const auto E = build_time_set(cfg);
    const auto sensors = build_sensors(cfg);

    json de = de_path ? load_json(*de_path) : de_json(cfg, run_de(cfg, fam));
    json ucp = ucp_path
                   ? load_json(*ucp_path)
                   : ucp_json(cfg, certify_ucp(sensors, E, cfg.grid,
                                               cfg.lambda_grid, cfg.trials,
                                               cfg.ucp.gamma1, cfg.ucp.d1_min,
                                               cfg.seed, cfg.ucp.method));
    check_lineage(de, cfg, "de");
    check_lineage(ucp, cfg, "ucp");
    if (!de.value("pass", false) || !ucp.value("pass", false)) {
      std::cerr << "constants: input certificates are not certified\n";
      return kCertificationFailure;
    }
    const auto bundle = assemble_bundle(cfg, de, ucp, sensors, E);
    const double q = q_ratio(bundle.gamma1, bundle.gamma2, bundle.gamma3);
    const auto geo = resolve_geometry(cfg, E, q);
    const auto seq_mode = cfg.mode == FactorMode::full_interval
                              ? SequenceMode::full_interval
                              : SequenceMode::general;
    build_sequence(E, geo.ell, geo.ell1, q, cfg.depth, seq_mode);
    const auto cert = derive_certificate(bundle, geo.delta1, cfg.horizon,
                                         geo.ell1, cfg.depth, cfg.mode);
    json j;
    j["schema"] = 1;
    j["kind"] = "observability_certificate";
    j["config_hash"] = cfg.config_hash;
    j["seed"] = cfg.seed;
    j["grid"] = grid_json(cfg.grid);
    j["bundle"] = bundle_json(bundle);
    j["certificate"] = certificate_json(cert, geo);
    json lifted = json::object();
    for (double r : cfg.r_list) {
      lifted[exponent_label(r)] = holder_lift(cert.C_obs, E.measure(), r);
    }
    j["C_obs_r"] = lifted;
    write_json(out_dir + "/observability_certificate.json", j);
    std::cout << "C_obs (r=1) = " << cert.C_obs
              << (cert.overflow ? "  [overflow: bound is vacuous]" : "")
              << "\n";
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const CertificateError& e) {
    std::cerr << e.what() << "\n";
    return kCertificationFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "constants failed: " << e.what() << "\n";
    return kCertificationFailure;
  }
}

int cmd_density_seq(const ExperimentConfig& cfg, const std::string& out_dir) {
  try {
    const auto E = build_time_set(cfg);
    const double gamma2 = build_symbol(cfg).degree;
    const double q = q_ratio(cfg.ucp.gamma1, gamma2, 1.0);
    const auto geo = resolve_geometry(cfg, E, q);
    const auto seq_mode = cfg.mode == FactorMode::full_interval
                              ? SequenceMode::full_interval
                              : SequenceMode::general;
    const auto seq =
        build_sequence(E, geo.ell, geo.ell1, q, cfg.depth, seq_mode);
    json j;
    j["schema"] = 1;
    j["kind"] = "density_sequence";
    j["config_hash"] = cfg.config_hash;
    j["seed"] = cfg.seed;
    j["q"] = q;
    j["ell"] = geo.ell;
    j["ell1"] = geo.ell1;
    j["theta0_strict"] = geo.theta0;
    try {
      j["theta0_relaxed"] = find_theta0(E, geo.ell, q, true);
    } catch (const std::domain_error&) {
      j["theta0_relaxed"] = 0.0;
    }
    j["factor"] = seq.factor;
    j["points"] = seq.points;
    j["gaps"] = seq.gaps;
    j["midpoints"] = seq.midpoints;
    j["gap_measure"] = seq.gap_measure;
    j["xi_measure"] = seq.xi_measure;
    write_json(out_dir + "/density_sequence.json", j);
    std::string csv = "m,ell_m,delta_m,xi_m,gap_measure,xi_measure\n";
    for (int i = 0; i < seq.depth; ++i) {
      csv += csv_row({static_cast<double>(i + 1), seq.points[i], seq.gaps[i],
                      seq.midpoints[i], seq.gap_measure[i], seq.xi_measure[i]});
    }
    write_text(out_dir + "/density_sequence.csv", csv);
    std::cout << "density point ell=" << geo.ell << " theta0=" << geo.theta0
              << " ell1=" << geo.ell1 << ", certificates verified for m <= "
              << seq.depth << "\n";
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const CertificateError& e) {
    std::cerr << e.what() << "\n";
    return kCertificationFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "density-seq failed: " << e.what() << "\n";
    return kCertificationFailure;
  }
}

int cmd_verify(const ExperimentConfig& cfg,
               const std::optional<std::string>& de_path,
               const std::optional<std::string>& ucp_path,
               const std::string& out_dir, bool diagnostic) {
  try {
    EvolutionFamily fam(build_symbol(cfg), cfg.grid);
    const auto E = build_time_set(cfg);
    const auto sensors = build_sensors(cfg);

    json de = de_path ? load_json(*de_path) : de_json(cfg, run_de(cfg, fam));
    json ucp = ucp_path
                   ? load_json(*ucp_path)
                   : ucp_json(cfg, certify_ucp(sensors, E, cfg.grid,
                                               cfg.lambda_grid, cfg.trials,
                                               cfg.ucp.gamma1, cfg.ucp.d1_min,
                                               cfg.seed, cfg.ucp.method));
    check_lineage(de, cfg, "de");
    check_lineage(ucp, cfg, "ucp");
    const bool certified = de.value("pass", false) && ucp.value("pass", false);
    if (!certified && !diagnostic) {
      std::cerr << "verify: refusing to certify with failed input "
                   "certificates (use diagnostic mode)\n";
      return kCertificationFailure;
    }

    const auto bundle = assemble_bundle(cfg, de, ucp, sensors, E);
    const double q = q_ratio(bundle.gamma1, bundle.gamma2, bundle.gamma3);
    const auto geo = resolve_geometry(cfg, E, q);
    const auto cert = derive_certificate(bundle, geo.delta1, cfg.horizon,
                                         geo.ell1, cfg.depth, cfg.mode);

    Rng rng = Rng(cfg.seed).fork(0xb0ULL);
    std::vector<Field> batch;
    for (int i = 0; i < cfg.batch; ++i) batch.push_back(random_field(cfg.grid, rng));

    json j;
    j["schema"] = 1;
    j["kind"] = "run_report";
    j["config_hash"] = cfg.config_hash;
    j["seed"] = cfg.seed;
    j["grid"] = grid_json(cfg.grid);
    j["versions"] = {{"obsverify", kVersion}};
    j["mode"] = diagnostic ? "diagnostic" : "certify";
    j["bundle"] = bundle_json(bundle);
    j["certificate"] = certificate_json(cert, geo);
    j["de"] = de;
    j["ucp"] = ucp;

    bool audits_pass = true;
    json telescopes = json::array();
    const int telescope_batch = std::min<int>(cfg.batch, 8);
    std::string audit_csv =
        "m,ell_m,delta_m,eps_m,lhs,rhs,slack\n";
    for (int i = 0; i < telescope_batch; ++i) {
      TelescopeAudit audit;
      try {
        audit = run_telescope(fam, sensors, bundle, E, geo.ell, geo.ell1,
                              cfg.depth, batch[i], cfg.mode, cfg.quad_tol);
      } catch (const CertificateError& e) {
        std::cerr << e.what() << "\n";
        return kCertificationFailure;
      }
      json t;
      t["x0_id"] = i;
      t["pass"] = audit.pass;
      t["min_slack"] = audit.min_slack;
      t["fail_m"] = audit.fail_m;
      t["F_ell1"] = audit.F_ell1;
      t["F_T"] = audit.F_T;
      t["int_E_G"] = audit.int_E_G;
      t["remainder"] = audit.remainder;
      t["sum_bound_finite"] = audit.sum_bound_finite;
      t["sum_bound_ideal"] = audit.sum_bound_ideal;
      t["overflow"] = audit.overflow;
      telescopes.push_back(t);
      if (!audit.pass) audits_pass = false;
      if (i == 0) {
        for (const auto& st : audit.steps) {
          audit_csv += csv_row({static_cast<double>(st.m), st.ell_m,
                                st.delta_m, st.eps_m, st.lhs, st.rhs,
                                st.slack});
        }
      }
    }
    j["telescope"] = telescopes;
    write_text(out_dir + "/telescope_audit.csv", audit_csv);

    // epsilon-balance audits on random (s, t in E, eps) tuples; these carry
    // the internal dissipation/uncertainty checks that catch corrupted
    // bundle constants even when the final inequality still holds
    {
      Rng brng = Rng(cfg.seed).fork(0xebULL);
      json balance = json::array();
      double min_slack = kInf;
      bool balance_pass = true;
      const int audited = std::min<int>(cfg.batch, 4);
      for (int i = 0; i < audited; ++i) {
        for (int k = 0; k < 12; ++k) {
          const auto& ivs = E.intervals();
          double pick = brng.uniform(0.0, E.measure());
          double t = ivs.back().b - 1e-9;
          for (const auto& iv : ivs) {
            if (pick <= iv.length()) {
              t = iv.a + std::max(0.05, std::min(0.95, pick / iv.length())) *
                             iv.length();
              break;
            }
            pick -= iv.length();
          }
          const double s = brng.uniform(0.0, 0.95 * t);
          const double eps =
              std::exp(brng.uniform(std::log(1e-4), std::log(0.9)));
          const auto audit =
              epsilon_balance_check(fam, sensors, bundle, s, t, eps, batch[i]);
          min_slack = std::min(min_slack, audit.slack);
          if (!audit.pass) balance_pass = false;
          json row;
          row["x0_id"] = i;
          row["s"] = audit.s;
          row["t"] = audit.t;
          row["eps"] = audit.eps;
          row["slack"] = audit.slack;
          row["pass"] = audit.pass;
          balance.push_back(row);
        }
      }
      j["balance"] = {{"rows", balance},
                      {"min_slack", min_slack},
                      {"pass", balance_pass}};
      if (!balance_pass) audits_pass = false;
    }

    json obs = json::array();
    for (double r : cfg.r_list) {
      const auto rep = verify_obs(fam, sensors, E, r, cert.C_obs, batch,
                                  cfg.quad_tol);
      json o;
      o["r"] = exponent_json(r);
      o["C_obs_r"] = rep.C_obs_r;
      o["min_margin"] = rep.min_margin;
      o["pass"] = rep.pass;
      o["overflow"] = rep.overflow;
      obs.push_back(o);
      if (!rep.pass) audits_pass = false;
      std::string csv = "x0_id,lhs,rhs,margin\n";
      for (const auto& row : rep.rows) {
        csv += csv_row({static_cast<double>(row.x0_id), row.lhs, row.rhs,
                        row.margin});
      }
      write_text(out_dir + "/obs_margins_r" + exponent_label(r) + ".csv", csv);
    }
    j["obs"] = obs;

    std::vector<double> trace_grid;
    for (int i = 0; i <= 128; ++i) trace_grid.push_back(cfg.horizon * i / 128.0);
    const auto traces = compute_traces(fam, sensors, batch[0], trace_grid, "x0_0");
    std::string trace_csv = "t,F,G\n";
    for (std::size_t i = 0; i < traces.times.size(); ++i) {
      trace_csv += csv_row({traces.times[i], traces.F[i], traces.G[i]});
    }
    write_text(out_dir + "/traces.csv", trace_csv);

    j["certified_inputs"] = certified;
    j["audits_pass"] = audits_pass;
    if (cfg.record_timings) {
      j["timings"] = {{"note", "wall-clock timings excluded from determinism"}};
    }
    write_json(out_dir + "/run_report.json", j);

    if (diagnostic) {
      std::cout << "diagnostic run: min margins reported in " << out_dir
                << "/run_report.json (no pass/fail verdict)\n";
      return kOk;
    }
    if (!audits_pass) {
      std::cerr << "verify: audits failed (see " << out_dir
                << "/run_report.json)\n";
      return kAuditFailure;
    }
    std::cout << "verify: all audits passed, C_obs(r=1) = " << cert.C_obs
              << (cert.overflow ? "  [overflow: bound is vacuous]" : "")
              << "\n";
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const CertificateError& e) {
    std::cerr << e.what() << "\n";
    return kCertificationFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "verify failed: " << e.what() << "\n";
    return kCertificationFailure;
  }
}

int cmd_report(const std::string& report_path) {
  try {
    const json j = load_json(report_path);
    std::cout << "run report (" << j.value("mode", "?") << " mode), grid N="
              << j.at("grid").value("N", 0) << ", seed=" << j.value("seed", 0)
              << "\n";
    const auto& cert = j.at("certificate");
    std::cout << "  q=" << cert.value("q", 0.0) << " c1=" << cert.value("c1", 0.0)
              << " c2=" << cert.value("c2", 0.0) << " c3=" << cert.value("c3", 0.0)
              << " c4=" << cert.value("c4", 0.0) << "\n";
    std::cout << "  C_obs(r=1) = " << cert.value("C_obs", 0.0);
    if (cert.value("overflow", false)) {
      std::cout << "  [overflow: bound is vacuous]";
    }
    std::cout << "\n";
    for (const auto& t : j.value("telescope", json::array())) {
      std::cout << "  telescope x0 " << t.value("x0_id", 0) << ": "
                << (t.value("pass", false) ? "pass" : "FAIL")
                << " (min slack " << t.value("min_slack", 0.0) << ")\n";
    }
    for (const auto& o : j.value("obs", json::array())) {
      std::cout << "  obs r=" << o.at("r").dump() << ": "
                << (o.value("pass", false) ? "pass" : "FAIL")
                << " (min margin " << o.value("min_margin", 0.0) << ")\n";
    }
    return kOk;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace obsv::cli
