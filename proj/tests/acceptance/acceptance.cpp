// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// fails. Desk scale: 1-D torus, N = 256, T = 1.

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "obsv/constants.hpp"
#include "obsv/evolution.hpp"
#include "obsv/observation.hpp"
#include "obsv/pipeline.hpp"
#include "obsv/rng.hpp"
#include "obsv/time_set.hpp"

using namespace obsv;

namespace {

constexpr double kPi = 3.14159265358979323846;
int g_failures = 0;

void run(int number, const char* title, const std::function<bool()>& body) {
  bool ok = false;
  std::string note;
  try {
    ok = body();
  } catch (const std::exception& e) {
    note = std::string(" (") + e.what() + ")";
  }
  std::printf("[%s] criterion %2d: %s%s\n", ok ? "PASS" : "FAIL", number,
              title, note.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

bool check(bool cond, const char* what) {
  if (!cond) std::printf("        failed: %s\n", what);
  return cond;
}

ConstantBundle certified_heat_bundle(const EvolutionFamily& fam,
                                     const SensorFamily& sensors,
                                     const TimeSet& E, const GridSpace& grid,
                                     UcpMethod ucp_method,
                                     const std::vector<double>& lambdas) {
  std::vector<double> times{0.0, 0.125, 0.25, 0.5, 0.75, 1.0};
  const auto de = certify_de(fam, SpectralProjector{}, lambdas, times, 5, 424242);
  if (!de.pass) throw std::runtime_error("de certification failed");
  const auto ucp = certify_ucp(sensors, E, grid, lambdas, 40, 1.0, 0.05,
                               424242, ucp_method);
  if (!ucp.pass) throw std::runtime_error("ucp certification failed: " + ucp.failure);
  const auto expb = estimate_exp_bound(fam, times, 5, 424242);
  ConstantBundle b;
  b.d0 = ucp.d0;
  b.d1 = ucp.d1;
  b.gamma1 = ucp.gamma1;
  b.d2 = de.d2;
  b.d3 = de.d3;
  b.gamma2 = de.gamma2;
  b.gamma3 = de.gamma3;
  b.gamma4 = de.gamma4;
  b.M = std::max(1.0, expb.M);
  b.omega = expb.omega;
  b.C_sup = sensors.csup(grid, E);
  b.validate();
  return b;
}

// ---------------------------------------------------------------- criteria

bool evolution_law_suite() {
  Rng rng(1001);
  const EllipticSymbol sym =
      modulated_symbol(1.0, 2, {0.0, 0.3, 0.7, 1.0}, {1.0, 2.0, 0.5});
  bool ok = true;
  for (double p : {1.0, 2.0, kInf}) {
    GridSpace grid{1, 256, p};
    EvolutionFamily fam(sym, grid);
    const int reps = 67;  // ~200 triples over the three norms
    for (int rep = 0; rep < reps; ++rep) {
      double a = rng.uniform(0.0, 1.0);
      double b = rng.uniform(0.0, 1.0);
      double c = rng.uniform(0.0, 1.0);
      if (a > b) std::swap(a, b);
      if (b > c) std::swap(b, c);
      if (a > b) std::swap(a, b);
      const Field x = random_field(grid, rng);
      const Field two = fam.apply(c, b, fam.apply(b, a, x));
      const Field one = fam.apply(c, a, x);
      Field diff = zero_field(grid);
      for (std::size_t i = 0; i < diff.data.size(); ++i) {
        diff.data[i] = two.data[i] - one.data[i];
      }
      ok = check(diff.norm() <= 1e-12 * x.norm(), "composition law") && ok;
      const Field id = fam.apply(b, b, x);
      for (std::size_t i = 0; i < x.data.size(); ++i) {
        if (id.data[i] != x.data[i]) {
          ok = check(false, "U(s,s) = Id exactly");
          break;
        }
      }
      if (!ok) return false;
    }
  }
  return ok;
}

bool exact_de_oracle() {
  GridSpace grid{1, 256, 2.0};
  EvolutionFamily fam(heat_symbol(1.0), grid);
  Rng rng(1002);
  bool ok = true;
  int violations = 0;
  for (int li = 0; li < 10; ++li) {
    const double lambda = 0.5 + 0.8 * li;  // up to 7.7
    SpectralProjector pr{lambda};
    for (int di = 0; di < 10; ++di) {
      const double dt = 0.01 + 0.024 * di;  // up to 0.226
      const double s = 0.1;
      for (int f = 0; f < 5; ++f) {
        const Field x = random_field(grid, rng);
        const double tail = apply_complement(pr, fam.apply(s + dt, s, x)).norm();
        const double bound = std::exp(-lambda * lambda * dt) * x.norm();
        if (tail > bound * (1.0 + 1e-10)) ++violations;
      }
    }
  }
  ok = check(violations == 0, "zero violations of the exact tail bound") && ok;
  return ok;
}

bool constants_pipeline_oracle() {
  // frozen by tests/oracles/constants_oracle.py
  ConstantBundle b;
  b.d0 = 1; b.d1 = 1; b.gamma1 = 1; b.gamma2 = 2; b.gamma3 = 1; b.gamma4 = 0;
  b.d2 = 1; b.d3 = 2; b.M = 1; b.omega = 0; b.C_sup = 1;
  const auto cert = derive_certificate(b, 1.0, 1.0, 1.0, 4, FactorMode::general);
  const auto close = [](double got, double want) {
    return std::abs(got - want) <= 1e-12 * std::abs(want);
  };
  bool ok = true;
  ok = check(close(cert.q, 0.75), "q = 0.75") && ok;
  ok = check(close(cert.c1, 2.0), "c1 = 2") && ok;
  ok = check(close(cert.c2, 0.25), "c2 = 0.25") && ok;
  ok = check(close(cert.c3, 2.0), "c3 = 2") && ok;
  ok = check(close(cert.c4, 1.5), "c4 = 1.5") && ok;
  ok = check(close(cert.C_obs, 2880.548201616698), "C_obs = 32 e^{4.5}") && ok;
  return ok;
}

bool maximizer_check() {
  Rng rng(1004);
  for (int draw = 0; draw < 100; ++draw) {
    const double d1 = rng.uniform(0.1, 3.0);
    const double d3 = rng.uniform(0.1, 3.0);
    const double g1 = rng.uniform(0.5, 2.0);
    const double g2 = g1 + rng.uniform(0.2, 2.0);
    const double g3 = rng.uniform(0.5, 2.0);
    const double dt = rng.uniform(0.05, 2.0);
    const double lam = lambda_star(d1, d3, g1, g2, g3, dt);
    const double fmax = f_max(d1, d3, g1, g2, g3, dt);
    if (!check(std::abs(f_value(d1, d3, g1, g2, g3, dt, lam) - fmax) <=
                   1e-12 * std::abs(fmax),
               "f(lambda_star) = f_max to 1e-12 relative")) {
      return false;
    }
    for (int k = 0; k < 1000; ++k) {
      const double probe = rng.uniform(1e-4, 8.0 * lam);
      if (f_value(d1, d3, g1, g2, g3, dt, probe) > fmax * (1 + 1e-12) + 1e-12) {
        return check(false, "f(lambda) <= f(lambda_star)");
      }
    }
  }
  return true;
}

bool appendix_suite() {
  Rng rng(1005);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<Interval> parts;
    const double anchor_len = rng.uniform(0.1, 0.3);
    const double anchor_a = rng.uniform(0.0, 1.0 - anchor_len);
    parts.push_back({anchor_a, anchor_a + anchor_len});
    const int extras = rng.uniform_int(0, 6);
    for (int i = 0; i < extras; ++i) {
      const double len = rng.uniform(0.005, 0.1);
      const double a = rng.uniform(0.0, 1.0 - len);
      parts.push_back({a, a + len});
    }
    const TimeSet set(1.0, parts);
    for (double q : {0.5, 0.75, 0.9}) {
      const auto dp = find_density_point(set, q);
      if (!dp) return check(false, "certified density point exists");
      const double ell1 = dp->ell + 0.95 * dp->theta0;
      DensitySequence seq;
      try {
        seq = build_sequence(set, dp->ell, ell1, q, 12);
      } catch (const CertificateError&) {
        return check(false, "certificates hold for all m <= 12");
      }
      // independent interval-arithmetic cross-check of every measure
      for (int i = 0; i < seq.depth; ++i) {
        double meas = 0.0;
        for (const auto& iv : set.intervals()) {
          const double lo = std::max(iv.a, seq.points[i + 1]);
          const double hi = std::min(iv.b, seq.points[i]);
          if (hi > lo) meas += hi - lo;
        }
        if (std::abs(meas - seq.gap_measure[i]) >
            1e-12 * std::max(1.0, meas)) {
          return check(false, "oracle agrees with gap measures");
        }
        if (seq.gaps[i] > 3.0 * meas * (1 + 1e-12)) {
          return check(false, "delta_m <= 3 |gap cap E|");
        }
      }
    }
  }
  return true;
}

bool epsilon_balance_suite() {
  GridSpace grid{1, 256, 2.0};
  EvolutionFamily fam(heat_symbol(1.0), grid);
  const auto sensors = SensorFamily::full(1.0, 1);
  const TimeSet E = TimeSet::full(1.0);
  const auto bundle = certified_heat_bundle(fam, sensors, E, grid,
                                            UcpMethod::exact_p2,
                                            {1.5, 3.0, 5.0, 8.0});
  Rng rng(1006);
  for (int rep = 0; rep < 500; ++rep) {
    const double t = rng.uniform(0.02, 1.0);
    const double s = rng.uniform(0.0, 0.95 * t);
    const double eps = std::exp(rng.uniform(std::log(1e-4), std::log(0.9)));
    const Field x0 = random_field(grid, rng);
    const auto audit = epsilon_balance_check(fam, sensors, bundle, s, t, eps, x0);
    if (!audit.pass) return check(false, "certified slack >= 0 on 500 tuples");
  }
  // fault injection: the inflated dissipation claim must be caught
  ConstantBundle corrupted = bundle;
  corrupted.d3 *= 10.0;
  int negatives = 0;
  for (int rep = 0; rep < 500; ++rep) {
    const double t = rng.uniform(0.1, 1.0);
    const double s = rng.uniform(0.0, 0.8 * t);
    const double eps = std::exp(rng.uniform(std::log(1e-3), std::log(0.5)));
    const Field x0 = random_field(grid, rng);
    const auto audit =
        epsilon_balance_check(fam, sensors, corrupted, s, t, eps, x0);
    if (audit.slack < 0.0) ++negatives;
  }
  return check(negatives > 0, "fault injection produces a negative slack");
}

bool end_to_end_obs() {
  Rng rng(1007);
  // (a) identity sensors on the whole interval
  {
    GridSpace grid{1, 256, 2.0};
    EvolutionFamily fam(heat_symbol(1.0), grid);
    const auto sensors = SensorFamily::full(1.0, 1);
    const TimeSet E = TimeSet::full(1.0);
    const auto bundle = certified_heat_bundle(fam, sensors, E, grid,
                                              UcpMethod::exact_p2,
                                              {1.5, 3.0, 5.0, 8.0});
    const auto audit_seq = build_sequence(E, 0.0, 1.0, 0.75, 8,
                                          SequenceMode::full_interval);
    const auto cert = derive_certificate(bundle, audit_seq.gaps.front(), 1.0,
                                         1.0, 8, FactorMode::full_interval);
    std::vector<Field> batch;
    for (int i = 0; i < 100; ++i) batch.push_back(random_field(grid, rng));
    for (double r : {1.0, 2.0, kInf}) {
      const auto rep = verify_obs(fam, sensors, E, r, cert.C_obs, batch, 1e-8);
      if (!check(rep.pass && rep.min_margin >= 0.0,
                 "identity-sensor margins >= 0")) {
        return false;
      }
    }
  }
  // (b) stripes on a fat Cantor set, empty sensors off E, general mode
  {
    GridSpace grid{1, 256, 2.0};
    EvolutionFamily fam(heat_symbol(1.0), grid);
    const auto E = fat_cantor(1.0, 6, geometric_schedule(6));
    const auto sensors = SensorFamily::stripes_on(E, 1, 2.0 * kPi / 8.0, 0.5);
    const auto bundle = certified_heat_bundle(fam, sensors, E, grid,
                                              UcpMethod::exact_p2,
                                              {2, 4, 8, 12, 16});
    const auto seq = build_sequence(E, 0.0, 1.0, 0.75, 8, SequenceMode::general);
    const auto cert = derive_certificate(bundle, seq.gaps.front(), 1.0, 1.0, 8,
                                         FactorMode::general);
    if (!check(!cert.overflow, "derived constant is finite")) return false;
    std::vector<Field> batch;
    for (int i = 0; i < 100; ++i) batch.push_back(random_field(grid, rng));
    for (double r : {1.0, 2.0, kInf}) {
      const auto rep = verify_obs(fam, sensors, E, r, cert.C_obs, batch, 1e-8);
      if (!check(rep.pass && rep.min_margin >= 0.0,
                 "fat-Cantor stripes margins >= 0")) {
        return false;
      }
    }
  }
  return true;
}

bool remark_envelope() {
  Rng rng(1008);
  for (int rep = 0; rep < 100; ++rep) {
    ConstantBundle b;
    b.d0 = rng.uniform(0.5, 3.0);
    b.d1 = rng.uniform(0.1, 2.0);
    b.gamma1 = rng.uniform(0.5, 1.5);
    b.gamma2 = b.gamma1 + rng.uniform(0.3, 3.0);
    b.gamma3 = rng.uniform(0.5, 2.0);
    b.gamma4 = rng.uniform(0.0, 1.0);
    b.d2 = rng.uniform(1.0, 3.0);
    b.d3 = rng.uniform(0.2, 3.0);
    b.M = rng.uniform(1.0, 3.0);
    b.omega = rng.uniform(-1.0, 2.0);
    b.C_sup = rng.uniform(0.0, 2.0);
    const double q = q_ratio(b.gamma1, b.gamma2, b.gamma3);
    const double horizon = rng.uniform(0.5, 3.0);
    const double tau1 = rng.uniform(0.0, 0.5 * horizon);
    const double tau2 = tau1 + rng.uniform(0.05, horizon - tau1);
    const double delta1 = (1.0 - q) * (tau2 - tau1);
    const auto [c1, c2] = derive_c1_c2(b);
    const auto [c3, c4] = derive_c3_c4(c1, c2, b.M, b.omega, delta1, b.kappa(),
                                       FactorMode::full_interval);
    const double explicit_log =
        cobs_explicit_log(c3, c4, q, delta1, b.M, b.omega, horizon, tau2,
                          b.kappa(), FactorMode::full_interval);
    const auto remark = remark_constants(b, q);
    for (double r : {1.0, 2.0, kInf}) {
      const double lifted = explicit_log + (1.0 - reciprocal_exponent(r)) *
                                               std::log(tau2 - tau1);
      const double bound_log =
          cobs_bound_log(remark, tau1, tau2, horizon, r, b.kappa());
      if (lifted > bound_log + 1e-9 * std::abs(bound_log) + 1e-9) {
        return check(false, "explicit constant below the remark envelope");
      }
    }
  }
  return true;
}

bool telescoping_identity() {
  // along audited sequences for both end-to-end configurations
  Rng rng(1009);
  for (int rep = 0; rep < 50; ++rep) {
    const double g1 = rng.uniform(0.5, 1.5);
    const double g2 = g1 + rng.uniform(0.3, 2.0);
    const double g3 = rng.uniform(0.5, 2.0);
    const double kappa = g1 * g3 / (g2 - g1);
    const double q = q_ratio(g1, g2, g3);
    const double c4 = rng.uniform(0.05, 3.0);
    const double base = rng.uniform(0.1, 1.0);
    const auto seq = build_sequence(TimeSet::full(1.0), 0.0, base, q, 12,
                                    SequenceMode::full_interval);
    for (int m = 0; m + 1 < 12; ++m) {
      const double lhs = 4.0 * c4 / std::pow(seq.gaps[m], kappa);
      const double rhs = 3.0 * c4 / std::pow(seq.gaps[m + 1], kappa);
      if (std::abs(std::expm1(lhs - rhs)) >= 1e-10) {
        return check(false, "exp(4c4/delta_m^k) = exp(3c4/delta_{m+1}^k)");
      }
    }
  }
  return true;
}

bool thickness_logic() {
  Rng rng(1010);
  // uniform thickness implies mean thickness with adjusted density
  for (int rep = 0; rep < 50; ++rep) {
    const int pieces = rng.uniform_int(1, 3);
    std::vector<double> mesh{0.0};
    for (int i = 1; i < pieces; ++i) mesh.push_back(static_cast<double>(i) / pieces);
    mesh.push_back(1.0);
    std::vector<std::vector<Box>> boxes(pieces);
    for (auto& piece : boxes) {
      const int count = rng.uniform_int(1, 3);
      for (int i = 0; i < count; ++i) {
        const double lo = rng.uniform(0.0, 2.0 * kPi * 0.8);
        const double hi = lo + rng.uniform(0.3, 2.0 * kPi - lo);
        piece.push_back({{lo, 0.0}, {hi, 0.0}});
      }
    }
    const SensorFamily fam(1.0, mesh, boxes, 1);
    const double a = rng.uniform(0.0, 0.5);
    const double b = a + rng.uniform(0.1, 1.0 - a);
    const TimeSet E(1.0, {{a, b}});
    const double L = rng.uniform(0.5, 2.0 * kPi);
    const double rho_star = uniform_thickness_check(fam, E, L, 0.0, 32).worst_ratio;
    if (rho_star <= 0.0) continue;
    if (!mean_thickness_check(fam, L, rho_star * E.measure(), 32).pass) {
      return check(false, "uniform thickness implies mean thickness");
    }
  }
  // the switching example: fails uniform, passes mean exactly at 1/2
  const auto sw = SensorFamily::switching_halves(1.0, 1);
  const TimeSet whole = TimeSet::full(1.0);
  bool ok = check(!uniform_thickness_check(sw, whole, kPi, 0.5, 64).pass,
                  "switching family fails the uniform check");
  const auto mean = mean_thickness_check(sw, kPi, 0.5, 64);
  ok = check(mean.pass, "switching family passes the mean check") && ok;
  ok = check(std::abs(mean.worst_ratio - 0.5) < 1e-12,
             "mean ratio is exactly one half") && ok;
  return ok;
}

}  // namespace

int main() {
  run(1, "evolution family algebra (composition, identity; p in {1,2,inf})",
      evolution_law_suite);
  run(2, "exact dissipation oracle for the heat family at p=2",
      exact_de_oracle);
  run(3, "constants pipeline against the standalone oracle",
      constants_pipeline_oracle);
  run(4, "maximizer consistency of the balance exponent",
      maximizer_check);
  run(5, "density-point sequence certificates over random interval sets",
      appendix_suite);
  run(6, "epsilon-balance audits, certified and fault-injected",
      epsilon_balance_suite);
  run(7, "final-state margins end to end (identity and fat-Cantor stripes)",
      end_to_end_obs);
  run(8, "explicit constant stays below the interval envelope",
      remark_envelope);
  run(9, "telescoping exponent identity along audited sequences",
      telescoping_identity);
  run(10, "thickness logic (uniform implies mean; switching example)",
      thickness_logic);
  if (g_failures != 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
