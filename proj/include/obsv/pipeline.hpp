#pragma once

#include <string>
#include <vector>

#include "obsv/constants.hpp"
#include "obsv/evolution.hpp"
#include "obsv/observation.hpp"
#include "obsv/time_set.hpp"

namespace obsv {

// Cached evaluator of F(t) = ||U(t,0)x0|| and G(t) = ||C(t)U(t,0)x0||:
// the spectrum of x0 and the sensor masks are computed once.
class TraceEvaluator {
 public:
  TraceEvaluator(const EvolutionFamily& fam, const SensorFamily& sensors,
                 const Field& x0);
  double F(double t) const;
  double G(double t) const;
  double norm_x0() const { return norm_x0_; }

 private:
  Field evolved(double t) const;
  const EvolutionFamily& fam_;
  const SensorFamily& sensors_;
  GridSpace space_;
  std::vector<cplx> spectrum0_;
  std::vector<std::vector<double>> masks_;
  double norm_x0_;
};

struct TraceRecord {
  std::vector<double> times;
  std::vector<double> F;
  std::vector<double> G;
  std::string x0_id;
};

TraceRecord compute_traces(const EvolutionFamily& fam,
                           const SensorFamily& sensors, const Field& x0,
                           std::span<const double> grid,
                           std::string x0_id = {});

// int_{E cap [a,b)} G(t)^r dt by composite midpoint per smooth segment
// (segments split at sensor and symbol mesh breakpoints), each refined until
// successive doublings differ by less than rel_tol.
double integrate_g_pow(const TraceEvaluator& ev, const EvolutionFamily& fam,
                       const SensorFamily& sensors, const TimeSet& E,
                       Interval window, double r, double rel_tol);

// largest G value over a fixed deterministic node set of E (stands in for
// the essential sup; conservative from below)
double sup_g(const TraceEvaluator& ev, const SensorFamily& sensors,
             const TimeSet& E);

// One evaluation of the epsilon-balance inequality
//   F(t) <= c1 exp(c2 (1/(t-s))^kappa) (eps^{-1} G(t) + eps F(s))
// together with the internal chain it is assembled from, at the lambda with
// eps = e^{-(d3/2) lambda^{gamma2} (t-s)^{gamma3}}: the two triangle
// inequalities, the uncertainty step and the dissipation step. `slack` is
// the smallest relative slack across all five checks, so corrupted bundle
// constants surface even when the final inequality still holds.
struct BalanceAudit {
  double s = 0.0, t = 0.0, eps = 0.0, lambda = 0.0;
  double F_t = 0.0, F_s = 0.0, G_t = 0.0;
  double F_lam = 0.0, F_perp = 0.0, G_lam = 0.0, G_perp = 0.0;
  double final_slack = 0.0;
  double ucp_slack = 0.0;
  double de_slack = 0.0;
  double tri_f_slack = 0.0;
  double tri_g_slack = 0.0;
  double slack = 0.0;
  bool pass = false;
};

BalanceAudit epsilon_balance_check(const EvolutionFamily& fam,
                                   const SensorFamily& sensors,
                                   const ConstantBundle& bundle, double s,
                                   double t, double eps, const Field& x0);

// Per-step record of the telescoping chain. Both forms of the step
// inequality are audited: the sampled-t form at the midpoint of the largest
// interval of (xi_m, ell_m) cap E, and the exact integrated form.
struct TelescopeStep {
  int m = 0;
  double ell_m = 0.0, ell_next = 0.0, xi_m = 0.0, delta_m = 0.0;
  double eps_m = 0.0;
  double t_sample = 0.0;
  double F_ell_m = 0.0, F_ell_next = 0.0, G_t = 0.0;
  double lhs = 0.0, rhs = 0.0, slack = 0.0;          // sampled-t inequality
  double diff_slack = 0.0;                            // delta-weighted diff
  double int_strong_slack = 0.0;                      // integrated over xi window
  double int_weak_slack = 0.0;                        // with the 6/2 factor
  double gap_measure = 0.0, xi_measure = 0.0;
  double int_g_xi = 0.0, int_g_gap = 0.0;
};

struct TelescopeAudit {
  DensitySequence sequence;
  std::vector<TelescopeStep> steps;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, q = 0.0, kappa = 0.0;
  double F_ell1 = 0.0;
  double F_T = 0.0;
  double int_E_G = 0.0;
  double remainder = 0.0;          // a_{depth+1}, vanishes as depth grows
  double sum_bound_finite = 0.0;   // bound on F(ell1) including the remainder
  double sum_bound_ideal = 0.0;    // (6|2) c3^2 q^-1 delta1^-1 e^{3c4/..} int_E G
  double sum_slack = 0.0;
  double exp_bound_slack = 0.0;    // F(T) <= M e^{omega(T-ell1)} F(ell1)
  double min_slack = 0.0;
  int fail_m = 0;                  // first failing step, 0 when none
  bool overflow = false;
  bool pass = false;
};

TelescopeAudit run_telescope(const EvolutionFamily& fam,
                             const SensorFamily& sensors,
                             const ConstantBundle& bundle, const TimeSet& E,
                             double ell, double ell1, int depth,
                             const Field& x0, FactorMode mode,
                             double quad_tol = 1e-8);

struct ObsMargin {
  int x0_id = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
};

struct ObsReport {
  double r = 1.0;
  double C_obs_r = 0.0;
  std::vector<ObsMargin> rows;
  double min_margin = 0.0;
  bool pass = false;
  bool overflow = false;
};

// ||U(T,0)x0|| <= C_obs(r) (int_E G^r)^{1/r} (ess-sup over E for r = inf);
// C_obs(r) comes from the r = 1 constant through the Hoelder lift.
ObsReport verify_obs(const EvolutionFamily& fam, const SensorFamily& sensors,
                     const TimeSet& E, double r, double cobs_r1,
                     std::span<const Field> batch, double quad_tol = 1e-8);

}  // namespace obsv
