#include "obsv/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "obsv/kernels.hpp"

namespace obsv {

namespace {

constexpr double kAuditTol = 1e-12;

// relative slack of lhs <= rhs; positive is good
double rel_slack(double lhs, double rhs) {
  if (std::isinf(rhs)) return kInf;
  const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
  return (rhs - lhs) / scale;
}

}  // namespace

TraceEvaluator::TraceEvaluator(const EvolutionFamily& fam,
                               const SensorFamily& sensors, const Field& x0)
    : fam_(fam), sensors_(sensors), space_(fam.space()) {
  spectrum0_ = spectrum(x0);
  norm_x0_ = x0.norm();
  masks_.reserve(sensors.pieces());
  for (int k = 0; k < sensors.pieces(); ++k) {
    masks_.push_back(sensors.mask(space_, k));
  }
}

Field TraceEvaluator::evolved(double t) const {
  std::vector<cplx> coeffs(spectrum0_);
  fam_.apply_spectral(t, 0.0, coeffs);
  return from_spectrum(space_, std::move(coeffs));
}

double TraceEvaluator::F(double t) const { return evolved(t).norm(); }

double TraceEvaluator::G(double t) const {
  Field u = evolved(t);
  const auto& m = masks_[sensors_.piece_of(t)];
  kernels::active().rmul(u.data.data(), u.data.data(), m.data(),
                         u.data.size());
  return u.norm();
}

TraceRecord compute_traces(const EvolutionFamily& fam,
                           const SensorFamily& sensors, const Field& x0,
                           std::span<const double> grid, std::string x0_id) {
  TraceEvaluator ev(fam, sensors, x0);
  TraceRecord rec;
  rec.x0_id = std::move(x0_id);
  for (double t : grid) {
    rec.times.push_back(t);
    rec.F.push_back(ev.F(t));
    rec.G.push_back(ev.G(t));
  }
  return rec;
}

namespace {

// integration segments: E intervals clipped to the window, split at sensor
// and symbol mesh breakpoints so the integrand is smooth per segment
std::vector<Interval> smooth_segments(const EvolutionFamily& fam,
                                      const SensorFamily& sensors,
                                      const TimeSet& E, Interval window) {
  std::vector<double> cuts;
  for (double b : sensors.mesh()) cuts.push_back(b);
  for (double b : fam.symbol().mesh) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Interval> segs;
  for (const auto& iv : E.intervals()) {
    double lo = std::max(iv.a, window.a);
    const double hi = std::min(iv.b, window.b);
    if (!(hi > lo)) continue;
    for (double c : cuts) {
      if (c > lo && c < hi) {
        segs.push_back({lo, c});
        lo = c;
      }
    }
    segs.push_back({lo, hi});
  }
  return segs;
}

double midpoint_refine(const std::function<double(double)>& f, Interval seg,
                       double rel_tol) {
  const double len = seg.length();
  int n = 1;
  double prev = len * f(seg.a + 0.5 * len);
  for (int iter = 0; iter < 12; ++iter) {
    n *= 2;
    const double h = len / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += f(seg.a + (i + 0.5) * h);
    const double cur = acc * h;
    if (std::abs(cur - prev) <= rel_tol * std::max(std::abs(cur), 1e-300)) {
      return cur;
    }
    prev = cur;
  }
  return prev;
}

}  // namespace

double integrate_g_pow(const TraceEvaluator& ev, const EvolutionFamily& fam,
                       const SensorFamily& sensors, const TimeSet& E,
                       Interval window, double r, double rel_tol) {
  const auto segs = smooth_segments(fam, sensors, E, window);
  const std::function<double(double)> f = [&ev, r](double t) {
    return std::pow(ev.G(t), r);
  };
  double total = 0.0;
  for (const auto& seg : segs) total += midpoint_refine(f, seg, rel_tol);
  return total;
}

double sup_g(const TraceEvaluator& ev, const SensorFamily& sensors,
             const TimeSet& E) {
  double best = 0.0;
  for (const auto& iv : E.intervals()) {
    std::vector<double> cuts{iv.a, iv.b};
    for (double b : sensors.mesh()) {
      if (b > iv.a && b < iv.b) cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double len = cuts[k + 1] - cuts[k];
      const int nodes = 32;
      for (int i = 0; i < nodes; ++i) {
        best = std::max(best, ev.G(cuts[k] + (i + 0.5) * len / nodes));
      }
    }
  }
  return best;
}

BalanceAudit epsilon_balance_check(const EvolutionFamily& fam,
                                   const SensorFamily& sensors,
                                   const ConstantBundle& bundle, double s,
                                   double t, double eps, const Field& x0) {
  bundle.validate();
  if (!(0.0 <= s && s < t && t <= fam.horizon())) {
    throw std::domain_error("epsilon_balance: need 0 <= s < t <= T");
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::domain_error("epsilon_balance: eps must lie in (0,1)");
  }
  BalanceAudit audit;
  audit.s = s;
  audit.t = t;
  audit.eps = eps;
  const double dt = t - s;
  const double kappa = bundle.kappa();
  const auto [c1, c2] = derive_c1_c2(bundle);

  // lambda with eps = exp(-(d3/2) lambda^{gamma2} dt^{gamma3})
  audit.lambda = std::pow(-2.0 * std::log(eps) /
                              (bundle.d3 * std::pow(dt, bundle.gamma3)),
                          1.0 / bundle.gamma2);

  TraceEvaluator ev(fam, sensors, x0);
  audit.F_t = ev.F(t);
  audit.F_s = ev.F(s);
  audit.G_t = ev.G(t);

  const Field u = fam.apply(t, 0.0, x0);
  SpectralProjector pr{audit.lambda};
  const Field u_low = apply_projector(pr, u);
  Field u_high = zero_field(u.space);
  kernels::active().csub(u_high.data.data(), u.data.data(),
                         u_low.data.data(), u_high.data.size());
  audit.F_lam = u_low.norm();
  audit.F_perp = u_high.norm();
  audit.G_lam = apply_C(sensors, u.space, t, u_low).norm();
  audit.G_perp = apply_C(sensors, u.space, t, u_high).norm();

  audit.tri_f_slack = rel_slack(audit.F_t, audit.F_lam + audit.F_perp);
  audit.tri_g_slack = rel_slack(audit.G_lam, audit.G_t + audit.G_perp);
  audit.ucp_slack = rel_slack(
      audit.F_lam, bundle.d0 *
                       std::exp(bundle.d1 * std::pow(audit.lambda, bundle.gamma1)) *
                       audit.G_lam);
  const double blow =
      std::max(1.0, std::pow(dt, -bundle.gamma4));
  audit.de_slack = rel_slack(
      audit.F_perp,
      bundle.d2 * blow *
          std::exp(-bundle.d3 * std::pow(audit.lambda, bundle.gamma2) *
                   std::pow(dt, bundle.gamma3)) *
          audit.F_s);
  const double rhs = c1 * std::exp(c2 * std::pow(1.0 / dt, kappa)) *
                     (audit.G_t / eps + eps * audit.F_s);
  audit.final_slack = rel_slack(audit.F_t, rhs);
  audit.slack = std::min({audit.final_slack, audit.ucp_slack, audit.de_slack,
                          audit.tri_f_slack, audit.tri_g_slack});
  audit.pass = audit.slack >= -kAuditTol;
  return audit;
}

namespace {

// midpoint of the largest interval of (lo, hi) cap E
double sample_point(const TimeSet& E, double lo, double hi) {
  double best_len = 0.0;
  double best_mid = 0.5 * (lo + hi);
  for (const auto& iv : E.intervals()) {
    const double a = std::max(iv.a, lo);
    const double b = std::min(iv.b, hi);
    if (b - a > best_len) {
      best_len = b - a;
      best_mid = 0.5 * (a + b);
    }
  }
  return best_mid;
}

}  // namespace

TelescopeAudit run_telescope(const EvolutionFamily& fam,
                             const SensorFamily& sensors,
                             const ConstantBundle& bundle, const TimeSet& E,
                             double ell, double ell1, int depth,
                             const Field& x0, FactorMode mode,
                             double quad_tol) {
  bundle.validate();
  TelescopeAudit audit;
  audit.kappa = bundle.kappa();
  audit.q = q_ratio(bundle.gamma1, bundle.gamma2, bundle.gamma3);
  const SequenceMode seq_mode = mode == FactorMode::full_interval
                                    ? SequenceMode::full_interval
                                    : SequenceMode::general;
  audit.sequence = build_sequence(E, ell, ell1, audit.q, depth, seq_mode);
  const auto& seq = audit.sequence;
  const double delta1 = seq.gaps.front();
  const auto [c1, c2] = derive_c1_c2(bundle);
  const auto [c3, c4] = derive_c3_c4(c1, c2, bundle.M, bundle.omega, delta1,
                                     audit.kappa, mode);
  audit.c1 = c1;
  audit.c2 = c2;
  audit.c3 = c3;
  audit.c4 = c4;
  const double factor_weak = mode == FactorMode::full_interval ? 2.0 : 6.0;

  TraceEvaluator ev(fam, sensors, x0);
  const double q = audit.q;
  const double kappa = audit.kappa;

  const auto a_term = [&](double delta, double f_val) {
    return delta * std::exp(-3.0 * c4 / std::pow(delta, kappa)) * f_val;
  };

  audit.min_slack = kInf;
  double weak_sum = 0.0;
  std::vector<double> f_points(depth + 1);
  for (int i = 0; i <= depth; ++i) f_points[i] = ev.F(seq.points[i]);
  audit.F_ell1 = f_points[0];

  for (int i = 0; i < depth; ++i) {
    TelescopeStep step;
    step.m = i + 1;
    step.ell_m = seq.points[i];
    step.ell_next = seq.points[i + 1];
    step.delta_m = seq.gaps[i];
    step.xi_m = seq.midpoints[i];
    step.gap_measure = seq.gap_measure[i];
    step.xi_measure = seq.xi_measure[i];
    step.F_ell_m = f_points[i];
    step.F_ell_next = f_points[i + 1];
    step.t_sample = sample_point(E, step.xi_m, step.ell_m);
    step.G_t = ev.G(step.t_sample);
    step.eps_m = epsilon_choice(c3, c4, step.delta_m, q, kappa);
    if (step.eps_m <= 0.0) audit.overflow = true;

    const double e3 = std::exp(3.0 * c4 / std::pow(step.delta_m, kappa));
    const double e1 = std::exp(-c4 / std::pow(step.delta_m, kappa));
    if (std::isinf(e3)) audit.overflow = true;
    step.lhs = step.F_ell_m;
    step.rhs = c3 * c3 / q * e3 * step.G_t + q * e1 * step.F_ell_next;
    step.slack = rel_slack(step.lhs, step.rhs);

    const double delta_next = i + 1 < depth ? seq.gaps[i + 1] : q * step.delta_m;
    const double a_m = a_term(step.delta_m, step.F_ell_m);
    const double a_next = a_term(delta_next, step.F_ell_next);
    step.diff_slack =
        rel_slack(a_m - a_next, c3 * c3 / q * step.delta_m * step.G_t);

    step.int_g_xi = integrate_g_pow(ev, fam, sensors, E,
                                    {step.xi_m, step.ell_m}, 1.0, quad_tol);
    step.int_g_gap = integrate_g_pow(ev, fam, sensors, E,
                                     {step.ell_next, step.ell_m}, 1.0, quad_tol);
    step.int_strong_slack =
        rel_slack((a_m - a_next) * step.xi_measure,
                  c3 * c3 / q * step.delta_m * step.int_g_xi);
    step.int_weak_slack =
        rel_slack(a_m - a_next, factor_weak * c3 * c3 / q * step.int_g_gap);

    weak_sum += factor_weak * c3 * c3 / q * step.int_g_gap;

    const double step_min = std::min({step.slack, step.diff_slack,
                                      step.int_strong_slack,
                                      step.int_weak_slack});
    if (step_min < audit.min_slack) audit.min_slack = step_min;
    if (step_min < -kAuditTol && audit.fail_m == 0) audit.fail_m = step.m;
    audit.steps.push_back(step);
  }

  audit.int_E_G = integrate_g_pow(ev, fam, sensors, E, {0.0, E.horizon()}, 1.0,
                                  quad_tol);
  const double delta_last = q * seq.gaps.back();
  audit.remainder = a_term(delta_last, ev.F(seq.points[depth]));
  const double lift = std::exp(3.0 * c4 / std::pow(delta1, kappa)) / delta1;
  if (std::isinf(lift)) audit.overflow = true;
  audit.sum_bound_finite = (weak_sum + audit.remainder) * lift;
  audit.sum_bound_ideal =
      factor_weak * c3 * c3 / q / delta1 *
      std::exp(3.0 * c4 / std::pow(delta1, kappa)) * audit.int_E_G;
  audit.sum_slack = rel_slack(audit.F_ell1, audit.sum_bound_finite);
  audit.min_slack = std::min(audit.min_slack, audit.sum_slack);

  audit.F_T = ev.F(fam.horizon());
  audit.exp_bound_slack = rel_slack(
      audit.F_T, bundle.M * std::exp(bundle.omega * (fam.horizon() - ell1)) *
                     audit.F_ell1);
  audit.min_slack = std::min(audit.min_slack, audit.exp_bound_slack);

  audit.pass = audit.min_slack >= -kAuditTol;
  if (!audit.pass && audit.fail_m == 0) audit.fail_m = depth + 1;
  return audit;
}

ObsReport verify_obs(const EvolutionFamily& fam, const SensorFamily& sensors,
                     const TimeSet& E, double r, double cobs_r1,
                     std::span<const Field> batch, double quad_tol) {
  ObsReport report;
  report.r = r;
  report.C_obs_r = holder_lift(cobs_r1, E.measure(), r);
  report.overflow = std::isinf(report.C_obs_r);
  report.min_margin = kInf;
  const double horizon = fam.horizon();
  bool all_pass = true;
  int id = 0;
  for (const auto& x0 : batch) {
    TraceEvaluator ev(fam, sensors, x0);
    ObsMargin row;
    row.x0_id = id++;
    row.lhs = ev.F(horizon);
    double obs_norm = 0.0;
    if (std::isinf(r)) {
      obs_norm = sup_g(ev, sensors, E);
    } else {
      obs_norm = std::pow(
          integrate_g_pow(ev, fam, sensors, E, {0.0, E.horizon()}, r, quad_tol),
          1.0 / r);
    }
    row.rhs = report.C_obs_r * obs_norm;
    row.margin = row.rhs - row.lhs;
    report.min_margin = std::min(report.min_margin, row.margin);
    if (rel_slack(row.lhs, row.rhs) < -kAuditTol) all_pass = false;
    report.rows.push_back(row);
  }
  report.pass = all_pass;
  return report;
}

}  // namespace obsv
