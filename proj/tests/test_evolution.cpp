#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "obsv/evolution.hpp"
#include "obsv/rng.hpp"

using namespace obsv;

namespace {

EllipticSymbol theta_xi2(double horizon) {
  // theta(t) xi^2 with theta = 1 on [0, T/2), 2 on [T/2, T]
  return modulated_symbol(horizon, 2, {0.0, 0.5 * horizon, horizon}, {1.0, 2.0});
}

EllipticSymbol shifted_heat(double horizon) {
  // a(t,xi) = xi^2 - 1: mode 0 grows like e^{t-s}
  EllipticSymbol sym;
  sym.dim = 1;
  sym.degree = 2;
  sym.mesh = {0.0, horizon};
  sym.terms.push_back({{2, 0}, {cplx{-1.0, 0.0}}});
  sym.terms.push_back({{0, 0}, {cplx{-1.0, 0.0}}});
  sym.ellipticity = 1.0;
  return sym;
}

}  // namespace

TEST_CASE("ellipticity certificates") {
  GridSpace g{1, 64, 2.0};
  const auto heat = check_ellipticity(heat_symbol(1.0), g);
  CHECK(heat.pass);
  CHECK(heat.degree == 2);
  CHECK(heat.c == doctest::Approx(1.0));

  // a(t,xi) = i xi^3 has vanishing real principal part
  EllipticSymbol skew;
  skew.dim = 1;
  skew.degree = 3;
  skew.mesh = {0.0, 1.0};
  skew.terms.push_back({{3, 0}, {cplx{-1.0, 0.0}}});  // -(i xi)^3 = i xi^3
  skew.ellipticity = 0.0;
  const auto bad = check_ellipticity(skew, g);
  CHECK(!bad.pass);

  EllipticSymbol quartic =
      modulated_symbol(1.0, 4, {0.0, 0.3, 1.0}, {1.0, 2.0});
  const auto cert = check_ellipticity(quartic, g);
  CHECK(cert.pass);
  CHECK(cert.degree == 4);
  CHECK(cert.c == doctest::Approx(1.0));  // min over the pieces

  EllipticSymbol degenerate;
  degenerate.dim = 1;
  degenerate.degree = 2;
  degenerate.mesh = {0.0, 1.0};
  degenerate.terms.push_back({{0, 0}, {cplx{1.0, 0.0}}});
  CHECK(!check_ellipticity(degenerate, g).pass);
  CHECK_THROWS_AS(EvolutionFamily(skew, g), std::invalid_argument);
}

TEST_CASE("apply_U on single modes") {
  GridSpace g{1, 64, 2.0};
  EvolutionFamily fam(heat_symbol(1.0), g);
  const Field x = mode_field(g, {3, 0});
  const Field y = fam.apply(0.6, 0.5, x);
  // mode 3 scaled by e^{-9 * 0.1}
  const double scale = std::exp(-0.9);
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    CHECK(std::abs(y.data[i] - scale * x.data[i]) < 1e-12);
  }
}

TEST_CASE("U(s,s) is the identity, exactly") {
  GridSpace g{1, 128, 2.0};
  Rng rng(3);
  EvolutionFamily fam(theta_xi2(1.0), g);
  const Field x = random_field(g, rng);
  const Field y = fam.apply(0.37, 0.37, x);
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    CHECK(y.data[i] == x.data[i]);
  }
  CHECK_THROWS_AS(fam.apply(0.2, 0.3, x), std::domain_error);
}

TEST_CASE("piecewise coefficients integrate exactly") {
  GridSpace g{1, 64, 2.0};
  EvolutionFamily fam(theta_xi2(1.0), g);
  const Field x = mode_field(g, {1, 0});
  const Field y = fam.apply(1.0, 0.0, x);
  // integral of theta over [0,1] is 1.5
  const double scale = std::exp(-1.5);
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    CHECK(std::abs(y.data[i] - scale * x.data[i]) < 1e-12);
  }
}

TEST_CASE("composition law over random triples") {
  Rng rng(17);
  for (double p : {1.0, 2.0, kInf}) {
    GridSpace g{1, 256, p};
    EvolutionFamily fam(theta_xi2(1.0), g);
    for (int rep = 0; rep < 70; ++rep) {
      double a = rng.uniform(0.0, 1.0);
      double b = rng.uniform(0.0, 1.0);
      double c = rng.uniform(0.0, 1.0);
      if (a > b) std::swap(a, b);
      if (b > c) std::swap(b, c);
      if (a > b) std::swap(a, b);
      const Field x = random_field(g, rng);
      const Field two_step = fam.apply(c, b, fam.apply(b, a, x));
      const Field one_step = fam.apply(c, a, x);
      Field diff = zero_field(g);
      for (std::size_t i = 0; i < diff.data.size(); ++i) {
        diff.data[i] = two_step.data[i] - one_step.data[i];
      }
      CHECK(diff.norm() <= 1e-12 * x.norm());
    }
  }
}

TEST_CASE("sharp projector keeps and drops the right modes") {
  GridSpace g{1, 64, 2.0};
  Field x = mode_field(g, {1, 0});
  const Field m3 = mode_field(g, {3, 0});
  for (std::size_t i = 0; i < x.data.size(); ++i) x.data[i] += m3.data[i];
  SpectralProjector pr{2.0};
  const Field kept = apply_projector(pr, x);
  const Field want = mode_field(g, {1, 0});
  for (std::size_t i = 0; i < kept.data.size(); ++i) {
    CHECK(std::abs(kept.data[i] - want.data[i]) < 1e-12);
  }
}

TEST_CASE("projector idempotence and partition") {
  GridSpace g{1, 128, 2.0};
  Rng rng(23);
  const Field x = random_field(g, rng);
  SpectralProjector pr{7.0};
  const Field once = apply_projector(pr, x);
  const Field twice = apply_projector(pr, once);
  Field diff = zero_field(g);
  for (std::size_t i = 0; i < diff.data.size(); ++i) {
    diff.data[i] = twice.data[i] - once.data[i];
  }
  CHECK(diff.norm() <= 1e-13 * x.norm());

  // multiplier-level idempotence is exact for the sharp cutoff
  for (double f : {0.0, 3.0, 7.0, 7.5, 20.0}) {
    const double w = pr.weight(f);
    CHECK(w * w == w);
  }

  // partition by construction: P x + (x - P x) recovers x to one rounding
  const Field tail = apply_complement(pr, x);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    worst = std::max(worst,
                     std::abs(once.data[i] + tail.data[i] - x.data[i]));
  }
  CHECK(worst <= 1e-15 * x.space.norm(x.data));
}

TEST_CASE("smoothed projector with a grid-free band acts sharply") {
  GridSpace g{1, 64, 2.0};
  SpectralProjector pr{4.5, SpectralProjector::Mode::smoothed, 0.08};
  // transition band (4.5, 4.86) contains no integer frequency
  for (std::size_t flat = 0; flat < g.size(); ++flat) {
    const double w = pr.weight(g.freq_abs(flat));
    CHECK((w == 0.0 || w == 1.0));
  }
  // a wider band takes intermediate values and stays monotone
  SpectralProjector wide{4.5, SpectralProjector::Mode::smoothed, 0.2};
  const double w5 = wide.weight(5.0);
  CHECK(w5 > 0.0);
  CHECK(w5 < 1.0);
  CHECK(wide.weight(4.6) >= wide.weight(5.0));
  CHECK(wide.weight(4.5) == 1.0);
  CHECK(wide.weight(5.5) == 0.0);
}

TEST_CASE("projector commutes with the evolution") {
  GridSpace g{1, 128, 2.0};
  Rng rng(29);
  EvolutionFamily fam(theta_xi2(1.0), g);
  SpectralProjector pr{9.0};
  for (int rep = 0; rep < 20; ++rep) {
    const Field x = random_field(g, rng);
    const Field a = apply_projector(pr, fam.apply(0.8, 0.1, x));
    const Field b = fam.apply(0.8, 0.1, apply_projector(pr, x));
    Field diff = zero_field(g);
    for (std::size_t i = 0; i < diff.data.size(); ++i) {
      diff.data[i] = a.data[i] - b.data[i];
    }
    CHECK(diff.norm() <= 1e-12 * x.norm());
  }
}

TEST_CASE("exponential bound for the heat family at p=2") {
  GridSpace g{1, 256, 2.0};
  EvolutionFamily fam(heat_symbol(1.0), g);
  std::vector<double> times;
  for (int i = 0; i <= 8; ++i) times.push_back(i / 8.0);
  const auto bound = estimate_exp_bound(fam, times, 6, 99);
  CHECK(bound.M == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(bound.omega == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(bound.worst_slack >= -1e-12);
}

TEST_CASE("exponential bound sees the growing mode of xi^2 - 1") {
  GridSpace g{1, 256, 2.0};
  EvolutionFamily fam(shifted_heat(1.0), g);
  std::vector<double> times;
  for (int i = 0; i <= 8; ++i) times.push_back(i / 8.0);
  const auto bound = estimate_exp_bound(fam, times, 6, 99);
  CHECK(bound.M == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(bound.omega == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("exponential bound certifies samples at p=inf") {
  GridSpace g{1, 256, kInf};
  EvolutionFamily fam(heat_symbol(1.0), g);
  std::vector<double> times;
  for (int i = 0; i <= 6; ++i) times.push_back(i / 6.0);
  const auto bound = estimate_exp_bound(fam, times, 8, 1234);
  CHECK(bound.M >= 1.0);
  CHECK(bound.worst_slack >= -1e-12);
}

TEST_CASE("dissipation certificate: exact heat case") {
  GridSpace g{1, 256, 2.0};
  EvolutionFamily fam(heat_symbol(1.0), g);
  std::vector<double> lambdas{1.5, 3.0, 5.0, 8.0};
  std::vector<double> times{0.0, 0.1, 0.25, 0.5, 1.0};
  const auto cert = certify_de(fam, SpectralProjector{}, lambdas, times, 6, 7);
  CHECK(cert.pass);
  CHECK(cert.provenance == "analytic");
  CHECK(cert.d2 == doctest::Approx(1.0));
  CHECK(cert.d3 == doctest::Approx(1.0));
  CHECK(cert.gamma2 == doctest::Approx(2.0));
  CHECK(cert.gamma3 == doctest::Approx(1.0));
  CHECK(cert.gamma4 == doctest::Approx(0.0));
  CHECK(cert.grid_n == 256);
}

TEST_CASE("dissipation certificate: modulated coefficient gives theta_min") {
  GridSpace g{1, 128, 2.0};
  EvolutionFamily fam(theta_xi2(1.0), g);
  std::vector<double> lambdas{1.5, 3.0, 6.0};
  std::vector<double> times{0.0, 0.2, 0.6, 1.0};
  const auto cert = certify_de(fam, SpectralProjector{}, lambdas, times, 5, 7);
  CHECK(cert.pass);
  CHECK(cert.provenance == "analytic");
  CHECK(cert.d3 == doctest::Approx(1.0));  // theta_min
}

TEST_CASE("dissipation certificate: fitted route at p=inf") {
  GridSpace g{1, 256, kInf};
  EvolutionFamily fam(heat_symbol(1.0), g);
  std::vector<double> lambdas{1.5, 3.0, 5.0, 8.0};
  std::vector<double> times{0.0, 0.1, 0.25, 0.5, 1.0};
  const auto cert = certify_de(fam, SpectralProjector{}, lambdas, times, 6, 7);
  CHECK(cert.pass);
  CHECK(cert.worst_violation <= 1e-10);
  CHECK(cert.d2 >= 1.0);
  CHECK(cert.d3 > 0.0);
}
