#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "obsv/constants.hpp"
#include "obsv/grid.hpp"
#include "obsv/rng.hpp"

using namespace obsv;

namespace {

ConstantBundle random_bundle(Rng& rng) {
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
  return b;
}

}  // namespace

TEST_CASE("q_ratio spot values") {
  CHECK(q_ratio(1, 2, 1) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(q_ratio(1, 3, 1) == doctest::Approx(0.5625).epsilon(1e-15));
  CHECK(q_ratio(1, 2, 2) == doctest::Approx(0.8660254037844386).epsilon(1e-15));
  CHECK_THROWS_AS(q_ratio(2, 1, 1), std::invalid_argument);
}

TEST_CASE("lambda_star spot values") {
  CHECK(lambda_star(1, 2, 1, 2, 1, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(lambda_star(1, 2, 1, 2, 1, 0.25) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(lambda_star(2, 1, 1, 3, 1, 1.0) ==
        doctest::Approx(1.1547005383792515).epsilon(1e-14));
}

TEST_CASE("f_max spot values and numeric maximization") {
  CHECK(f_max(1, 2, 1, 2, 1, 1.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(f_max(1, 2, 1, 2, 1, 0.25) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f_max(2, 1, 1, 3, 1, 1.0) ==
        doctest::Approx(1.539600717839002).epsilon(1e-14));
  // grid search cross-check for the non-trivial case
  double best = -kInf;
  for (double lam = 1e-3; lam < 10.0; lam += 1e-3) {
    best = std::max(best, f_value(2, 1, 1, 3, 1, 1.0, lam));
  }
  CHECK(f_max(2, 1, 1, 3, 1, 1.0) == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("maximizer consistency over random draws") {
  Rng rng(101);
  for (int rep = 0; rep < 100; ++rep) {
    const double d1 = rng.uniform(0.1, 3.0);
    const double d3 = rng.uniform(0.1, 3.0);
    const double g1 = rng.uniform(0.5, 2.0);
    const double g2 = g1 + rng.uniform(0.2, 2.0);
    const double g3 = rng.uniform(0.5, 2.0);
    const double dt = rng.uniform(0.05, 2.0);
    const double lam = lambda_star(d1, d3, g1, g2, g3, dt);
    const double fmax = f_max(d1, d3, g1, g2, g3, dt);
    CHECK(f_value(d1, d3, g1, g2, g3, dt, lam) ==
          doctest::Approx(fmax).epsilon(1e-12));
    // strictly smaller off the maximizer
    CHECK(f_value(d1, d3, g1, g2, g3, dt, lam * (1 + 1e-3)) < fmax);
    CHECK(f_value(d1, d3, g1, g2, g3, dt, lam * (1 - 1e-3)) < fmax);
    for (int k = 0; k < 100; ++k) {
      const double probe = rng.uniform(1e-3, 10.0 * lam);
      CHECK(f_value(d1, d3, g1, g2, g3, dt, probe) <= fmax * (1 + 1e-12) + 1e-12);
    }
  }
}

TEST_CASE("blowup envelope") {
  CHECK(blowup_envelope(1, 2, 1, 0, 0.37) == 1.0);
  CHECK(blowup_envelope(1, 2, 1, 1, 1.0) == doctest::Approx(std::exp(1.0)));
  CHECK(blowup_envelope(1, 2, 1, 1, 1.0) >= 1.0);
  // e^{20} dominates 0.1^{-2}
  CHECK(blowup_envelope(1, 2, 1, 2, 0.1) >= 100.0);
  Rng rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const double g4 = rng.uniform(0.0, 2.0);
    const double dt = rng.uniform(0.01, 2.0);
    CHECK(blowup_envelope(1, 2, 1, g4, dt) >=
          std::max(1.0, std::pow(dt, -g4)) * (1 - 1e-12));
  }
}

TEST_CASE("c1, c2 derivation") {
  ConstantBundle b;
  b.d0 = 1; b.d1 = 1; b.gamma1 = 1; b.gamma2 = 2; b.gamma3 = 1; b.gamma4 = 0;
  b.d2 = 1; b.d3 = 2; b.M = 1; b.omega = 0; b.C_sup = 1;
  auto [c1, c2] = derive_c1_c2(b);
  CHECK(c1 == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(c2 == doctest::Approx(0.25).epsilon(1e-15));
  b.gamma4 = 1;
  CHECK(derive_c1_c2(b).second == doctest::Approx(1.25).epsilon(1e-15));
  b.gamma4 = 0;
  b.d0 = 3; b.C_sup = 0;
  CHECK(derive_c1_c2(b).first == doctest::Approx(3.0));
  CHECK(derive_c1_c2(b).first >= 1.0);
}

TEST_CASE("c3, c4 derivation") {
  auto [c3, c4] = derive_c3_c4(2.0, 0.25, 1.0, 0.0, 1.0, 1.0, FactorMode::general);
  CHECK(c3 == doctest::Approx(2.0));
  CHECK(c4 == doctest::Approx(1.5));
  CHECK(derive_c3_c4(2.0, 0.25, 1.0, 0.0, 1.0, 1.0, FactorMode::full_interval)
            .second == doctest::Approx(0.5));
  // negative omega is clipped in c3
  CHECK(derive_c3_c4(1.0, 0.25, 2.0, -1.0, 5.0, 1.0, FactorMode::general).first ==
        doctest::Approx(2.0));
}

TEST_CASE("epsilon choice") {
  CHECK(epsilon_choice(2.0, 1.5, 1.0, 0.75, 1.0) ==
        doctest::Approx(0.01867015063794898).epsilon(1e-13));
  CHECK(epsilon_choice(2.0, 1.5, 0.5, 0.75, 1.0) ==
        doctest::Approx(0.0009295320662498844).epsilon(1e-13));
  Rng rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const auto b = random_bundle(rng);
    const double q = q_ratio(b.gamma1, b.gamma2, b.gamma3);
    const auto [c1, c2] = derive_c1_c2(b);
    const double delta1 = rng.uniform(1e-3, 10.0);
    const auto [c3, c4] =
        derive_c3_c4(c1, c2, b.M, b.omega, delta1, b.kappa(), FactorMode::general);
    const double eps = epsilon_choice(c3, c4, delta1, q, b.kappa());
    CHECK(eps < 1.0);
    CHECK(eps >= 0.0);
  }
}

TEST_CASE("explicit observability constant") {
  CHECK(cobs_explicit(2, 1.5, 0.75, 1, 1, 0, 1, 1, 1, FactorMode::general) ==
        doctest::Approx(2880.548201616698).epsilon(1e-13));
  CHECK(cobs_explicit(2, 0.5, 0.75, 1, 1, 0, 1, 1, 1, FactorMode::full_interval) ==
        doctest::Approx(47.804683416939355).epsilon(1e-13));
  CHECK(cobs_explicit(2, 1.5, 0.75, 1, 1, 1, 3, 1, 1, FactorMode::general) ==
        doctest::Approx(21284.532257419578).epsilon(1e-13));
}

TEST_CASE("remark constants and bound") {
  ConstantBundle b;
  b.d0 = 1; b.d1 = 1; b.gamma1 = 1; b.gamma2 = 2; b.gamma3 = 1; b.gamma4 = 0;
  b.d2 = 1; b.d3 = 2; b.M = 1; b.omega = 0; b.C_sup = 1;
  const auto r1 = remark_constants(b, 0.75);
  CHECK(r1.C1 == doctest::Approx(42.666666666666664).epsilon(1e-14));
  CHECK(r1.C2 == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(r1.C3 == 0.0);
  b.omega = 2.0;
  CHECK(remark_constants(b, 0.75).C3 == doctest::Approx(6.0));
  b.omega = 0.0;
  ConstantBundle b2 = b;
  b2.M = 2; b2.d0 = 1; b2.d2 = 1; b2.C_sup = 0;  // c1 = 1
  CHECK(remark_constants(b2, 0.5).C1 == doctest::Approx(64.0));

  CHECK(cobs_bound(r1, 0, 1, 1, 1.0, 1.0) ==
        doctest::Approx(17212.96185569003).epsilon(1e-12));
  CHECK(cobs_bound(r1, 0, 1, 1, kInf, 1.0) ==
        doctest::Approx(17212.96185569003).epsilon(1e-12));
  CHECK(cobs_bound(r1, 0, 4, 1, 2.0, 1.0) ==
        doctest::Approx(95.60936683387871).epsilon(1e-12));
}

TEST_CASE("Hoelder lift") {
  CHECK(holder_lift(10, 2, 1.0) == doctest::Approx(10.0));
  CHECK(holder_lift(10, 4, 2.0) == doctest::Approx(20.0));
  CHECK(holder_lift(10, 4, kInf) == doctest::Approx(40.0));
}

TEST_CASE("telescoping exponent identity for the chosen q") {
  Rng rng(21);
  for (int rep = 0; rep < 200; ++rep) {
    const double g1 = rng.uniform(0.5, 1.5);
    const double g2 = g1 + rng.uniform(0.3, 2.0);
    const double g3 = rng.uniform(0.5, 2.0);
    const double kappa = g1 * g3 / (g2 - g1);
    const double q = q_ratio(g1, g2, g3);
    const double c4 = rng.uniform(0.1, 3.0);
    double delta = rng.uniform(0.05, 2.0);
    for (int m = 0; m < 8; ++m) {
      const double next = q * delta;
      const double lhs = 4.0 * c4 / std::pow(delta, kappa);
      const double rhs = 3.0 * c4 / std::pow(next, kappa);
      CHECK(std::abs(std::expm1(lhs - rhs)) < 1e-10);
      delta = next;
    }
  }
}

TEST_CASE("full-interval explicit constant stays below the remark envelope") {
  Rng rng(31);
  for (int rep = 0; rep < 200; ++rep) {
    auto b = random_bundle(rng);
    const double q = q_ratio(b.gamma1, b.gamma2, b.gamma3);
    const double horizon = rng.uniform(0.5, 3.0);
    const double tau1 = rng.uniform(0.0, horizon * 0.5);
    const double tau2 = tau1 + rng.uniform(0.05, horizon - tau1);
    const double delta1 = (1.0 - q) * (tau2 - tau1);
    const auto [c1, c2] = derive_c1_c2(b);
    const auto [c3, c4] = derive_c3_c4(c1, c2, b.M, b.omega, delta1, b.kappa(),
                                       FactorMode::full_interval);
    const double lhs = cobs_explicit_log(c3, c4, q, delta1, b.M, b.omega,
                                         horizon, tau2, b.kappa(),
                                         FactorMode::full_interval);
    const auto remark = remark_constants(b, q);
    for (double r : {1.0, 2.0, kInf}) {
      // Hoelder lift of the r=1 constant: + (1-1/r) log(tau2-tau1)
      const double lifted =
          lhs + (1.0 - reciprocal_exponent(r)) * std::log(tau2 - tau1);
      const double rhs = cobs_bound_log(remark, tau1, tau2, horizon, r, b.kappa());
      CHECK(lifted <= rhs + 1e-9 * std::abs(rhs) + 1e-9);
    }
  }
}

TEST_CASE("monotonicity of the explicit constant") {
  const double base =
      cobs_explicit(2, 1.5, 0.75, 1.0, 1, 0, 1, 1, 1, FactorMode::general);
  // nonincreasing in delta1
  CHECK(cobs_explicit(2, 1.5, 0.75, 1.1, 1, 0, 1, 1, 1, FactorMode::general) <=
        base);
  // nondecreasing in c4 (i.e. in c2)
  CHECK(cobs_explicit(2, 1.6, 0.75, 1.0, 1, 0, 1, 1, 1, FactorMode::general) >=
        base);
  // nondecreasing in M
  CHECK(cobs_explicit(2, 1.5, 0.75, 1.0, 1.5, 0, 1, 1, 1, FactorMode::general) >=
        base);
  // nondecreasing in omega_+ through the trailing factor (T > ell1)
  CHECK(cobs_explicit(2, 1.5, 0.75, 1.0, 1, 0.5, 2, 1, 1, FactorMode::general) >=
        cobs_explicit(2, 1.5, 0.75, 1.0, 1, 0.0, 2, 1, 1, FactorMode::general));
}

TEST_CASE("certificate chain for the worked instance") {
  ConstantBundle b;
  b.d0 = 1; b.d1 = 1; b.gamma1 = 1; b.gamma2 = 2; b.gamma3 = 1; b.gamma4 = 0;
  b.d2 = 1; b.d3 = 2; b.M = 1; b.omega = 0; b.C_sup = 1;
  const auto cert = derive_certificate(b, 1.0, 1.0, 1.0, 4, FactorMode::general);
  CHECK(cert.kappa == doctest::Approx(1.0));
  CHECK(cert.q == doctest::Approx(0.75));
  CHECK(cert.c1 == doctest::Approx(2.0));
  CHECK(cert.c2 == doctest::Approx(0.25));
  CHECK(cert.c3 == doctest::Approx(2.0));
  CHECK(cert.c4 == doctest::Approx(1.5));
  CHECK(cert.C_obs == doctest::Approx(2880.548201616698).epsilon(1e-13));
  CHECK(cert.eps.size() == 4);
  CHECK(cert.eps[0] == doctest::Approx(0.01867015063794898).epsilon(1e-13));
  CHECK(!cert.overflow);
}

TEST_CASE("overflow is flagged, not thrown") {
  ConstantBundle b;
  b.d0 = 1; b.d1 = 1; b.gamma1 = 1; b.gamma2 = 2; b.gamma3 = 1; b.gamma4 = 0;
  b.d2 = 1; b.d3 = 2; b.M = 1; b.omega = 0; b.C_sup = 1;
  const auto cert =
      derive_certificate(b, 1e-4, 1.0, 1.0, 4, FactorMode::general);
  CHECK(std::isinf(cert.C_obs));
  CHECK(cert.overflow);
}

TEST_CASE("bundle invariants are enforced") {
  ConstantBundle b;
  b.gamma1 = 2.0;
  b.gamma2 = 1.0;  // violates gamma2 > gamma1
  CHECK_THROWS_AS(b.validate(), std::invalid_argument);
  ConstantBundle b2;
  b2.d2 = 0.5;
  CHECK_THROWS_AS(b2.validate(), std::invalid_argument);
  ConstantBundle b3;
  b3.M = 0.5;
  CHECK_THROWS_AS(b3.validate(), std::invalid_argument);
}
