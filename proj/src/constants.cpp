#include "obsv/constants.hpp"

#include <cmath>
#include <stdexcept>

#include "obsv/grid.hpp"

namespace obsv {

void ConstantBundle::validate() const {
  if (!(gamma2 > gamma1)) {
    throw std::invalid_argument("bundle: gamma2 > gamma1 is required");
  }
  if (!(gamma1 > 0.0 && gamma3 > 0.0)) {
    throw std::invalid_argument("bundle: gamma1, gamma3 must be positive");
  }
  if (gamma4 < 0.0) throw std::invalid_argument("bundle: gamma4 must be >= 0");
  if (!(d0 > 0.0 && d1 > 0.0 && d3 > 0.0)) {
    throw std::invalid_argument("bundle: d0, d1, d3 must be positive");
  }
  if (d2 < 1.0) throw std::invalid_argument("bundle: d2 must be >= 1");
  if (M < 1.0) throw std::invalid_argument("bundle: M must be >= 1");
  if (C_sup < 0.0) throw std::invalid_argument("bundle: C_sup must be >= 0");
  if (extra_c2 < 0.0) throw std::invalid_argument("bundle: extra_c2 must be >= 0");
}

double q_ratio(double gamma1, double gamma2, double gamma3) {
  if (!(gamma2 > gamma1) || !(gamma1 > 0.0) || !(gamma3 > 0.0)) {
    throw std::invalid_argument("q_ratio: need 0 < gamma1 < gamma2, gamma3 > 0");
  }
  return std::pow(0.75, (gamma2 - gamma1) / (gamma1 * gamma3));
}

double f_value(double d1, double d3, double gamma1, double gamma2,
               double gamma3, double dt, double lambda) {
  return d1 * std::pow(lambda, gamma1) -
         0.5 * d3 * std::pow(lambda, gamma2) * std::pow(dt, gamma3);
}

double lambda_star(double d1, double d3, double gamma1, double gamma2,
                   double gamma3, double dt) {
  if (!(gamma2 > gamma1) || !(dt > 0.0)) {
    throw std::invalid_argument("lambda_star: need gamma2 > gamma1, dt > 0");
  }
  return std::pow(2.0 * d1 * gamma1 / (d3 * gamma2), 1.0 / (gamma2 - gamma1)) *
         std::pow(1.0 / dt, gamma3 / (gamma2 - gamma1));
}

double f_max(double d1, double d3, double gamma1, double gamma2, double gamma3,
             double dt) {
  const double kappa = gamma1 * gamma3 / (gamma2 - gamma1);
  return d1 * (1.0 - gamma1 / gamma2) *
         std::pow(2.0 * d1 * gamma1 / (d3 * gamma2), gamma1 / (gamma2 - gamma1)) *
         std::pow(1.0 / dt, kappa);
}

double blowup_envelope(double gamma1, double gamma2, double gamma3,
                       double gamma4, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("blowup_envelope: dt > 0");
  if (gamma4 == 0.0) return 1.0;
  const double kappa = gamma1 * gamma3 / (gamma2 - gamma1);
  return std::exp(gamma4 / kappa * std::pow(dt, -kappa));
}

std::pair<double, double> derive_c1_c2(const ConstantBundle& b) {
  b.validate();
  const double c1 = std::max(b.d0, (b.d0 * b.C_sup + 1.0) * b.d2);
  double c2 = b.d1 * (1.0 - b.gamma1 / b.gamma2) *
                  std::pow(2.0 * b.d1 * b.gamma1 / (b.d3 * b.gamma2),
                           b.gamma1 / (b.gamma2 - b.gamma1)) +
              b.gamma4 * (b.gamma2 - b.gamma1) / (b.gamma1 * b.gamma3);
  c2 += b.extra_c2;
  return {c1, c2};
}

std::pair<double, double> derive_c3_c4(double c1, double c2, double M,
                                       double omega, double delta1,
                                       double kappa, FactorMode mode) {
  if (!(delta1 > 0.0)) throw std::invalid_argument("derive_c3_c4: delta1 > 0");
  const double omega_plus = omega > 0.0 ? omega : 0.0;
  const double c3 = M * c1 * std::exp(omega_plus * delta1);
  const double inner = mode == FactorMode::full_interval ? 2.0 : 6.0;
  const double c4 = c2 * std::pow(inner, kappa);
  return {c3, c4};
}

double epsilon_choice(double c3, double c4, double delta_m, double q,
                      double kappa) {
  if (!(delta_m > 0.0)) throw std::invalid_argument("epsilon_choice: delta_m > 0");
  return q / c3 * std::exp(-2.0 * c4 / std::pow(delta_m, kappa));
}

double cobs_explicit_log(double c3, double c4, double q, double delta1,
                         double M, double omega, double horizon, double ell1,
                         double kappa, FactorMode mode) {
  const double lead = mode == FactorMode::full_interval ? 2.0 : 6.0;
  return std::log(lead) + 2.0 * std::log(c3) - std::log(q) - std::log(delta1) +
         3.0 * c4 / std::pow(delta1, kappa) + std::log(M) +
         omega * (horizon - ell1);
}

double cobs_explicit(double c3, double c4, double q, double delta1, double M,
                     double omega, double horizon, double ell1, double kappa,
                     FactorMode mode) {
  if (!(delta1 > 0.0) || !(ell1 <= horizon)) {
    throw std::invalid_argument("cobs_explicit: need delta1 > 0, ell1 <= T");
  }
  const double lead = mode == FactorMode::full_interval ? 2.0 : 6.0;
  return lead * c3 * c3 / q / delta1 *
         std::exp(3.0 * c4 / std::pow(delta1, kappa)) * M *
         std::exp(omega * (horizon - ell1));
}

RemarkConstants remark_constants(const ConstantBundle& b, double q) {
  b.validate();
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("remark_constants: q in (0,1)");
  const auto [c1, c2] = derive_c1_c2(b);
  const double kappa = b.kappa();
  RemarkConstants out;
  out.C1 = 2.0 * b.M * b.M * b.M * c1 * c1 / (q * (1.0 - q));
  out.C2 = 3.0 * c2 * std::pow(2.0 / (1.0 - q), kappa);
  out.C3 = 3.0 * b.omega_plus();
  return out;
}

double cobs_bound_log(const RemarkConstants& c, double tau1, double tau2,
                      double horizon, double r, double kappa) {
  if (!(tau1 < tau2 && tau2 <= horizon)) {
    throw std::invalid_argument("cobs_bound: need tau1 < tau2 <= T");
  }
  const double width = tau2 - tau1;
  return std::log(c.C1) - reciprocal_exponent(r) * std::log(width) +
         c.C2 / std::pow(width, kappa) + c.C3 * horizon;
}

double cobs_bound(const RemarkConstants& c, double tau1, double tau2,
                  double horizon, double r, double kappa) {
  const double width = tau2 - tau1;
  if (!(tau1 < tau2 && tau2 <= horizon)) {
    throw std::invalid_argument("cobs_bound: need tau1 < tau2 <= T");
  }
  return c.C1 / std::pow(width, reciprocal_exponent(r)) *
         std::exp(c.C2 / std::pow(width, kappa) + c.C3 * horizon);
}

double holder_lift(double cobs_r1, double measure_E, double r) {
  if (!(r >= 1.0)) throw std::invalid_argument("holder_lift: r >= 1");
  return cobs_r1 * std::pow(measure_E, 1.0 - reciprocal_exponent(r));
}

ObservabilityCertificate derive_certificate(const ConstantBundle& b,
                                            double delta1, double horizon,
                                            double ell1, int depth,
                                            FactorMode mode) {
  b.validate();
  ObservabilityCertificate cert;
  cert.mode = mode;
  cert.kappa = b.kappa();
  cert.q = q_ratio(b.gamma1, b.gamma2, b.gamma3);
  const auto [c1, c2] = derive_c1_c2(b);
  cert.c1 = c1;
  cert.c2 = c2;
  const auto [c3, c4] =
      derive_c3_c4(c1, c2, b.M, b.omega, delta1, cert.kappa, mode);
  cert.c3 = c3;
  cert.c4 = c4;
  cert.delta1 = delta1;
  cert.extra_c2_used = b.extra_c2 > 0.0;
  double delta = delta1;
  for (int m = 1; m <= depth; ++m) {
    cert.eps.push_back(epsilon_choice(c3, c4, delta, cert.q, cert.kappa));
    delta *= cert.q;
  }
  cert.C_obs = cobs_explicit(c3, c4, cert.q, delta1, b.M, b.omega, horizon,
                             ell1, cert.kappa, mode);
  const auto remark = remark_constants(b, cert.q);
  cert.C1 = remark.C1;
  cert.C2 = remark.C2;
  cert.C3 = remark.C3;
  cert.overflow = std::isinf(cert.C_obs) || std::isinf(cert.c3);
  for (double e : cert.eps) {
    if (e <= 0.0) cert.overflow = true;  // underflowed epsilon: vacuous step
  }
  return cert;
}

}  // namespace obsv
