#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace obsv {

// General mode keeps the constants of the unrefined chain (factors 6 and 3);
// full-interval mode uses the refined factors (2) valid when the time set
// contains the whole interval (ell, ell1). Mixing is rejected at the
// certificate level.
enum class FactorMode { general, full_interval };

// Inputs to the observability chain:
//  - (d0, d1, gamma1): uncertainty-principle envelope,
//  - (d2, d3, gamma2, gamma3, gamma4): dissipation envelope,
//  - (M, omega): exponential bound of the evolution family,
//  - C_sup: sup of the observation operator norms over the time set.
struct ConstantBundle {
  double d0 = 1.0;
  double d1 = 1.0;
  double gamma1 = 1.0;
  double d2 = 1.0;
  double d3 = 1.0;
  double gamma2 = 2.0;
  double gamma3 = 1.0;
  double gamma4 = 0.0;
  double M = 1.0;
  double omega = 0.0;
  double C_sup = 1.0;
  // optional additive term on c2 for sub-exponential blow-up envelopes;
  // flagged in reports when nonzero
  double extra_c2 = 0.0;

  double kappa() const { return gamma1 * gamma3 / (gamma2 - gamma1); }
  double omega_plus() const { return omega > 0.0 ? omega : 0.0; }
  void validate() const;  // throws std::invalid_argument on violation
};

// (3/4)^{(gamma2-gamma1)/(gamma1 gamma3)} = (3/4)^{1/kappa}; in (0,1).
double q_ratio(double gamma1, double gamma2, double gamma3);

// f(lambda) = d1 lambda^gamma1 - (d3/2) lambda^gamma2 dt^gamma3 and its
// unique maximizer / maximum on (0, inf).
double f_value(double d1, double d3, double gamma1, double gamma2,
               double gamma3, double dt, double lambda);
double lambda_star(double d1, double d3, double gamma1, double gamma2,
                   double gamma3, double dt);
double f_max(double d1, double d3, double gamma1, double gamma2, double gamma3,
             double dt);

// exp(gamma4 (gamma2-gamma1)/(gamma1 gamma3) dt^{-kappa}), dominating
// max{1, dt^{-gamma4}}.
double blowup_envelope(double gamma1, double gamma2, double gamma3,
                       double gamma4, double dt);

// c1 = max{d0, (d0 C_sup + 1) d2} >= 1,
// c2 = d1(1-g1/g2)(2 d1 g1/(d3 g2))^{g1/(g2-g1)} + g4(g2-g1)/(g1 g3) [+extra]
std::pair<double, double> derive_c1_c2(const ConstantBundle& b);

// c3 = M c1 e^{omega_+ delta1} >= 1, c4 = c2 * 6^kappa (or 2^kappa refined)
std::pair<double, double> derive_c3_c4(double c1, double c2, double M,
                                       double omega, double delta1,
                                       double kappa, FactorMode mode);

// epsilon = c3^{-1} q exp(-2 c4 / delta_m^kappa), in (0,1)
double epsilon_choice(double c3, double c4, double delta_m, double q,
                      double kappa);

// (6 or 2) c3^2 q^{-1} delta1^{-1} exp(3 c4/delta1^kappa) M e^{omega(T-ell1)}
double cobs_explicit(double c3, double c4, double q, double delta1, double M,
                     double omega, double horizon, double ell1, double kappa,
                     FactorMode mode);
double cobs_explicit_log(double c3, double c4, double q, double delta1,
                         double M, double omega, double horizon, double ell1,
                         double kappa, FactorMode mode);

struct RemarkConstants {
  double C1 = 0.0;  // 2 M^3 c1^2 / (q(1-q))
  double C2 = 0.0;  // 3 c2 (2/(1-q))^kappa
  double C3 = 0.0;  // 3 omega_+
};
RemarkConstants remark_constants(const ConstantBundle& b, double q);

// C1/(tau2-tau1)^{1/r} exp(C2/(tau2-tau1)^kappa + C3 T), 1/inf = 0.
double cobs_bound(const RemarkConstants& c, double tau1, double tau2,
                  double horizon, double r, double kappa);
double cobs_bound_log(const RemarkConstants& c, double tau1, double tau2,
                      double horizon, double r, double kappa);

// C_obs(r) = C_obs(1) * measE^{1-1/r}
double holder_lift(double cobs_r1, double measure_E, double r);

// Derived chain plus audit bookkeeping. `overflow` marks that some exp(.)
// saturated to +inf: the bound is still valid but numerically vacuous.
struct ObservabilityCertificate {
  double kappa = 0.0;
  double q = 0.0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
  double delta1 = 0.0;
  std::vector<double> eps;  // per telescope step
  double C_obs = 0.0;       // r = 1 explicit constant
  double C1 = 0.0, C2 = 0.0, C3 = 0.0;
  double r = 1.0;
  FactorMode mode = FactorMode::general;
  bool overflow = false;
  bool extra_c2_used = false;
};

// Evaluates the whole chain for a validated bundle and a telescope geometry.
ObservabilityCertificate derive_certificate(const ConstantBundle& b,
                                            double delta1, double horizon,
                                            double ell1, int depth,
                                            FactorMode mode);

}  // namespace obsv
