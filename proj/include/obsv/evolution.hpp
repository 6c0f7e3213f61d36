#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "obsv/grid.hpp"
#include "obsv/symbol.hpp"

namespace obsv {

// Two-parameter Fourier-multiplier family U(t,s): each mode is scaled by
// exp(-Phi(t,s,xi)) with Phi the accumulated symbol integral. Phases are
// differences of one cached cumulative table, so composition holds exactly:
// Phi(t,s) + Phi(s,r) = Phi(t,r) in floating point.
class EvolutionFamily {
 public:
  EvolutionFamily(EllipticSymbol symbol, GridSpace space);

  const GridSpace& space() const { return space_; }
  const EllipticSymbol& symbol() const { return symbol_; }
  double horizon() const { return symbol_.horizon(); }

  // U(t,s)x; requires 0 <= s <= t <= T. U(s,s) is the identity, exactly.
  Field apply(double t, double s, const Field& x) const;

  // Same action on mode coefficients (skips the transforms).
  void apply_spectral(double t, double s, std::span<cplx> coeffs) const;

  // Accumulated integral of the symbol over [s,t] for one mode.
  cplx phase(double t, double s, std::size_t flat) const;

 private:
  std::vector<cplx> cumulative(double t) const;  // helper used by phase cache

  EllipticSymbol symbol_;
  GridSpace space_;
  std::vector<cplx> cum_;           // breakpoint-cumulative integrals, per mode
  std::vector<cplx> piece_symbol_;  // a(piece, xi), per mode
};

// Sharp or smoothed frequency cutoff. The smoothed mode uses a fixed C^inf
// transition multiplier on (lambda, lambda(1+width)); with a band free of
// grid frequencies it coincides with a sharp cutoff and stays idempotent.
struct SpectralProjector {
  enum class Mode { sharp, smoothed };
  double lambda = 1.0;
  Mode mode = Mode::sharp;
  double width = 0.0;  // relative transition width (smoothed mode)

  double weight(double freq_abs) const;
};

Field apply_projector(const SpectralProjector& pr, const Field& x);
// x - P x, computed by subtraction so P + (Id-P) = Id exactly
Field apply_complement(const SpectralProjector& pr, const Field& x);

// Exponential bound ||U(t,s)x|| <= M e^{omega(t-s)} ||x|| fitted over a time
// grid and probe fields: upper-hull LP minimizing log M + omega T with ties
// broken toward smaller log M, then smaller |omega|.
struct ExpBound {
  double M = 1.0;
  double omega = 0.0;
  int samples = 0;
  double worst_slack = 0.0;  // min over samples of bound - observed (log scale)
};
ExpBound estimate_exp_bound(const EvolutionFamily& fam,
                            std::span<const double> times, int trials,
                            std::uint64_t seed);

// Dissipation certificate ||(Id-P_lambda)U(t,s)x|| <=
//   d2 max{1,(t-s)^{-gamma4}} e^{-d3 lambda^{gamma2} (t-s)^{gamma3}} ||x||
// with gamma2 = degree, gamma3 = 1, gamma4 = 0 fixed. The analytic candidate
// (d2 = 1, d3 = full-symbol decay) is tried first; otherwise d3 is the
// least-squares slope of -log(ratio) against lambda^{gamma2}(t-s) and d2
// absorbs the worst intercept excess (clipped to >= 1).
struct DeCertificate {
  double d2 = 1.0;
  double d3 = 1.0;
  double gamma2 = 2.0;
  double gamma3 = 1.0;
  double gamma4 = 0.0;
  bool pass = false;
  std::string provenance;      // "analytic" | "fitted"
  std::string failure;
  int samples = 0;
  double worst_violation = 0.0;  // max over samples of lhs/rhs - 1 (<= 0 ok)
  int grid_n = 0;                // constants are valid at this resolution only
};
DeCertificate certify_de(const EvolutionFamily& fam,
                         const SpectralProjector& projector_template,
                         std::span<const double> lambda_grid,
                         std::span<const double> times, int trials,
                         std::uint64_t seed);

}  // namespace obsv
