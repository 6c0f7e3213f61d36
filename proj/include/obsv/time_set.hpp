#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace obsv {

// Half-open interval [a,b) on the time axis.
struct Interval {
  double a = 0.0;
  double b = 0.0;
  double length() const { return b - a; }
};

// Finite union of disjoint, sorted half-open intervals inside [0,T].
// Stands in for a measurable subset of positive measure; all measure
// queries are exact interval arithmetic.
class TimeSet {
 public:
  TimeSet(double horizon, std::vector<Interval> parts);
  static TimeSet full(double horizon) {
    return TimeSet(horizon, {{0.0, horizon}});
  }

  double horizon() const { return horizon_; }
  const std::vector<Interval>& intervals() const { return parts_; }

  double measure() const;
  // Lebesgue measure of the intersection with a window; the window must lie
  // inside [0,T].
  double measure(Interval window) const;
  bool contains(double t) const;

 private:
  double horizon_;
  std::vector<Interval> parts_;
};

// Smith-Volterra-Cantor style construction: at step k every current interval
// loses an open central piece of absolute width schedule[k-1] * horizon.
TimeSet fat_cantor(double horizon, int depth, std::span<const double> schedule);

// schedule k -> ratio^k, k = 1..depth (ratio 1/4 gives the classic set)
std::vector<double> geometric_schedule(int depth, double ratio = 0.25);

// |(ell, ell+theta) \cap S| / theta
double right_density(const TimeSet& s, double ell, double theta);

// Density-point margin constants: strict (1-q)/(2(1+q)), relaxed
// min{(1-q)/(2q), 1/2}.
double density_kappa(double q, bool relaxed);

// Largest theta0 (on a grid of step grid_step, default 1e-4*T, refined by the
// breakpoints of S so the check is exact for every theta < theta0) such that
// |(ell,ell+theta)\S| < kappa(q) |(ell,ell+theta) cap S| for all
// 0 < theta < theta0. Throws std::domain_error when no theta passes at the
// grid resolution.
double find_theta0(const TimeSet& s, double ell, double q, bool relaxed = false,
                   double grid_step = 0.0);

struct DensityPoint {
  double ell = 0.0;
  double theta0 = 0.0;
};

// Scans interval left endpoints, certifies each via find_theta0 and returns
// the smallest ell attaining the maximal theta0.
std::optional<DensityPoint> find_density_point(const TimeSet& s, double q,
                                               bool relaxed = false,
                                               double grid_step = 0.0);

enum class SequenceMode { general, full_interval };

// Geometric refinement towards a density point:
//   ell_m = ell + q^{m-1}(ell1 - ell), delta_m = ell_m - ell_{m+1},
//   xi_m = ell_{m+1} + delta_m/factor' with factor' = 6 (general) or 2
//   (full-interval refinement).
struct DensitySequence {
  double ell = 0.0;
  double ell1 = 0.0;
  double q = 0.0;
  int depth = 0;
  SequenceMode mode = SequenceMode::general;
  double factor = 3.0;               // proportionality factor (3 or 2)
  std::vector<double> points;        // ell_1 .. ell_{depth+1}
  std::vector<double> gaps;          // delta_1 .. delta_depth
  std::vector<double> midpoints;     // xi_1 .. xi_depth
  std::vector<double> gap_measure;   // |(ell_{m+1}, ell_m) cap S|
  std::vector<double> xi_measure;    // |(xi_m, ell_m) cap S|
};

class CertificateError : public std::runtime_error {
 public:
  CertificateError(int m, const std::string& what)
      : std::runtime_error(what), m_(m) {}
  int step() const { return m_; }

 private:
  int m_;
};

// Builds the sequence and verifies, per step,
//   delta_m <= factor * |(ell_{m+1}, ell_m) cap S|   and
//   |(xi_m, ell_m) cap S| >= delta_m / factor'.
// Throws CertificateError naming the first failing m.
DensitySequence build_sequence(const TimeSet& s, double ell, double ell1,
                               double q, int depth,
                               SequenceMode mode = SequenceMode::general);

}  // namespace obsv
