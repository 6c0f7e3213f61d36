#include "obsv/time_set.hpp"

#include <algorithm>
#include <cmath>

namespace obsv {

namespace {
// relative slack for certificate comparisons (both sides are exact interval
// sums, only rounding separates them)
constexpr double kCertSlack = 1e-12;
}  // namespace

TimeSet::TimeSet(double horizon, std::vector<Interval> parts)
    : horizon_(horizon) {
  if (!(horizon > 0.0)) throw std::invalid_argument("time set: horizon must be positive");
  std::sort(parts.begin(), parts.end(),
            [](const Interval& x, const Interval& y) { return x.a < y.a; });
  for (const auto& iv : parts) {
    if (!(iv.a < iv.b)) throw std::invalid_argument("time set: empty interval");
    if (iv.a < 0.0 || iv.b > horizon) {
      throw std::invalid_argument("time set: interval outside [0,T]");
    }
  }
  // merge touching/overlapping neighbours ([a,b) u [b,c) = [a,c))
  for (const auto& iv : parts) {
    if (!parts_.empty() && iv.a <= parts_.back().b) {
      parts_.back().b = std::max(parts_.back().b, iv.b);
    } else {
      parts_.push_back(iv);
    }
  }
  if (parts_.empty()) throw std::invalid_argument("time set: must have positive measure");
}

double TimeSet::measure() const {
  double total = 0.0;
  for (const auto& iv : parts_) total += iv.length();
  return total;
}

double TimeSet::measure(Interval window) const {
  if (window.a < 0.0 || window.b > horizon_ || window.a > window.b) {
    throw std::domain_error("time set: window outside [0,T]");
  }
  double total = 0.0;
  for (const auto& iv : parts_) {
    const double lo = std::max(iv.a, window.a);
    const double hi = std::min(iv.b, window.b);
    if (hi > lo) total += hi - lo;
  }
  return total;
}

bool TimeSet::contains(double t) const {
  for (const auto& iv : parts_) {
    if (t >= iv.a && t < iv.b) return true;
  }
  return false;
}

TimeSet fat_cantor(double horizon, int depth,
                   std::span<const double> schedule) {
  if (depth < 1) throw std::invalid_argument("fat_cantor: depth must be >= 1");
  if (static_cast<int>(schedule.size()) < depth) {
    throw std::invalid_argument("fat_cantor: schedule shorter than depth");
  }
  std::vector<Interval> current{{0.0, horizon}};
  for (int k = 0; k < depth; ++k) {
    const double frac = schedule[k];
    if (!(frac > 0.0 && frac < 1.0)) {
      throw std::domain_error("fat_cantor: removal fractions must lie in (0,1)");
    }
    const double width = frac * horizon;
    std::vector<Interval> next;
    next.reserve(current.size() * 2);
    for (const auto& iv : current) {
      if (width >= iv.length()) {
        throw std::domain_error("fat_cantor: schedule removes the full measure");
      }
      const double mid = 0.5 * (iv.a + iv.b);
      next.push_back({iv.a, mid - 0.5 * width});
      next.push_back({mid + 0.5 * width, iv.b});
    }
    current = std::move(next);
  }
  return TimeSet(horizon, std::move(current));
}

std::vector<double> geometric_schedule(int depth, double ratio) {
  std::vector<double> out(depth);
  double v = 1.0;
  for (int k = 0; k < depth; ++k) {
    v *= ratio;
    out[k] = v;
  }
  return out;
}

double right_density(const TimeSet& s, double ell, double theta) {
  if (!(theta > 0.0)) throw std::domain_error("right_density: theta must be positive");
  if (ell < 0.0 || ell >= s.horizon() || theta > s.horizon() - ell) {
    throw std::domain_error("right_density: window outside [0,T]");
  }
  return s.measure({ell, ell + theta}) / theta;
}

double density_kappa(double q, bool relaxed) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0,1)");
  if (relaxed) return std::min((1.0 - q) / (2.0 * q), 0.5);
  return (1.0 - q) / (2.0 * (1.0 + q));
}

double find_theta0(const TimeSet& s, double ell, double q, bool relaxed,
                   double grid_step) {
  if (ell < 0.0 || ell >= s.horizon()) {
    throw std::domain_error("find_theta0: ell outside [0,T)");
  }
  const double kappa = density_kappa(q, relaxed);
  const double span = s.horizon() - ell;
  const double h = grid_step > 0.0 ? grid_step : 1e-4 * s.horizon();

  // Both measures are piecewise linear in theta with kinks only at interval
  // endpoints of S shifted by ell, so positivity of
  //   g(theta) = kappa |(ell,ell+theta) cap S| - |(ell,ell+theta) \ S|
  // at every evaluation point certifies it on the whole segment between them
  // (g is linear in between and g(0) = 0).
  std::vector<double> thetas;
  for (const auto& iv : s.intervals()) {
    if (iv.a > ell && iv.a - ell <= span) thetas.push_back(iv.a - ell);
    if (iv.b > ell && iv.b - ell <= span) thetas.push_back(iv.b - ell);
  }
  for (double t = h; t < span; t += h) thetas.push_back(t);
  thetas.push_back(span);
  std::sort(thetas.begin(), thetas.end());
  thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());

  double certified = 0.0;  // largest grid value with everything below passing
  for (const double theta : thetas) {
    const double inside = s.measure({ell, ell + theta});
    const double outside = theta - inside;
    if (!(outside < kappa * inside)) break;
    certified = theta;
  }
  if (certified <= 0.0) {
    throw std::domain_error(
        "find_theta0: not a density point at this resolution");
  }
  return certified;
}

std::optional<DensityPoint> find_density_point(const TimeSet& s, double q,
                                               bool relaxed, double grid_step) {
  std::optional<DensityPoint> best;
  for (const auto& iv : s.intervals()) {
    double theta0 = 0.0;
    try {
      theta0 = find_theta0(s, iv.a, q, relaxed, grid_step);
    } catch (const std::domain_error&) {
      continue;
    }
    // smallest ell attaining the maximal certified horizon
    if (!best || theta0 > best->theta0) best = DensityPoint{iv.a, theta0};
  }
  return best;
}

DensitySequence build_sequence(const TimeSet& s, double ell, double ell1,
                               double q, int depth, SequenceMode mode) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("build_sequence: q in (0,1)");
  if (!(ell < ell1 && ell1 <= s.horizon())) {
    throw std::invalid_argument("build_sequence: need ell < ell1 <= T");
  }
  if (depth < 1) throw std::invalid_argument("build_sequence: depth must be >= 1");

  DensitySequence seq;
  seq.ell = ell;
  seq.ell1 = ell1;
  seq.q = q;
  seq.depth = depth;
  seq.mode = mode;
  seq.factor = mode == SequenceMode::full_interval ? 2.0 : 3.0;
  const double xi_div = mode == SequenceMode::full_interval ? 2.0 : 6.0;

  if (mode == SequenceMode::full_interval) {
    const double covered = s.measure({ell, ell1});
    if (covered < (ell1 - ell) * (1.0 - kCertSlack)) {
      throw CertificateError(0,
                             "build_sequence: full-interval mode requires "
                             "S to contain (ell, ell1)");
    }
  }

  const double base = ell1 - ell;
  double pw = 1.0;
  seq.points.push_back(ell1);
  for (int m = 1; m <= depth; ++m) {
    pw *= q;
    seq.points.push_back(ell + pw * base);
  }
  for (int m = 0; m < depth; ++m) {
    const double lm = seq.points[m];
    const double lm1 = seq.points[m + 1];
    const double delta = lm - lm1;
    const double xi = lm1 + delta / xi_div;
    const double gap_meas = s.measure({lm1, lm});
    const double xi_meas = s.measure({xi, lm});
    seq.gaps.push_back(delta);
    seq.midpoints.push_back(xi);
    seq.gap_measure.push_back(gap_meas);
    seq.xi_measure.push_back(xi_meas);
    if (delta > seq.factor * gap_meas * (1.0 + kCertSlack)) {
      throw CertificateError(
          m + 1, "build_sequence: gap certificate failed at m=" +
                     std::to_string(m + 1) +
                     " (ell1 too large or ell not a density point)");
    }
    if (xi_meas < delta / xi_div * (1.0 - kCertSlack)) {
      throw CertificateError(
          m + 1, "build_sequence: xi certificate failed at m=" +
                     std::to_string(m + 1));
    }
  }
  return seq;
}

}  // namespace obsv
