#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "obsv/grid.hpp"
#include "obsv/time_set.hpp"

namespace obsv {

// Axis-aligned box on the torus [0,2pi)^d; in 1-D only the first axis is
// used. Boxes never wrap (generators split wrapped pieces).
struct Box {
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{0.0, 0.0};
};

// Time-dependent sensor sets Omega(t): piecewise constant in time on a
// declared mesh, each piece a finite union of boxes. The observation
// operator C(t) is multiplication by the indicator on the grid.
class SensorFamily {
 public:
  SensorFamily(double horizon, std::vector<double> mesh,
               std::vector<std::vector<Box>> pieces, int dim);

  static SensorFamily full(double horizon, int dim);
  static SensorFamily empty(double horizon, int dim);
  // periodic stripes along the first axis: period, filled fraction
  static SensorFamily stripes(double horizon, int dim, double period,
                              double fill);
  // Omega(t) = left half torus for t <= T/2, right half afterwards
  static SensorFamily switching_halves(double horizon, int dim);
  // stripes on the pieces covering E, empty sensors elsewhere
  static SensorFamily stripes_on(const TimeSet& E, int dim, double period,
                                 double fill);

  double horizon() const { return horizon_; }
  int dim() const { return dim_; }
  int pieces() const { return static_cast<int>(mesh_.size()) - 1; }
  const std::vector<double>& mesh() const { return mesh_; }
  const std::vector<Box>& boxes(int piece) const { return pieces_[piece]; }
  int piece_of(double t) const;
  // a representative time inside piece `k` intersected with E (if any)
  std::optional<double> representative(int piece, const TimeSet& E) const;
  std::vector<int> pieces_meeting(const TimeSet& E) const;

  // exact volume of Omega(piece) within the periodic window (0,L)^d + corner
  double window_intersection(int piece, std::array<double, 2> corner,
                             double window_side) const;
  double volume(int piece) const;

  // 0/1 indicator over grid points
  std::vector<double> mask(const GridSpace& g, int piece) const;
  // sup over pieces meeting E of the multiplier operator norm on the grid
  double csup(const GridSpace& g, const TimeSet& E) const;

 private:
  double horizon_;
  int dim_;
  std::vector<double> mesh_;
  std::vector<std::vector<Box>> pieces_;
};

Field apply_C(const SensorFamily& fam, const GridSpace& g, double t,
              const Field& x);

struct ThicknessReport {
  bool pass = false;
  double worst_ratio = 0.0;  // min over windows of volume / L^d
  double witness_t = 0.0;
  std::array<double, 2> witness_x{0.0, 0.0};
};

// |Omega(t) cap ((0,L)^d + x)| >= rho L^d for all t in E-pieces and all grid
// translates x (periodic wrap-around).
ThicknessReport uniform_thickness_check(const SensorFamily& fam,
                                        const TimeSet& E, double L, double rho,
                                        int scan_n);
// (1/T) int_0^T |Omega(t) cap ((0,L)^d + x)| dt >= rho L^d, exact in time.
ThicknessReport mean_thickness_check(const SensorFamily& fam, double L,
                                     double rho, int scan_n);

enum class UcpMethod { sample, exact_p2, automatic };

// Certificate for ||P_lambda x|| <= d0 e^{d1 lambda^{gamma1}} essinf over E
// of ||C(.) P_lambda x||. essinf is an exact minimum over the mesh pieces
// meeting E. `exact_p2` bounds the worst band-limited ratio per piece by the
// smallest eigenvalue of the masked Gram matrix (p = 2 only, valid for the
// whole subspace); `sample` is the empirical envelope over random
// band-limited fields. Records coverage: the bound is certified on the
// lambda grid, at this resolution.
struct UcpCertificate {
  double d0 = 1.0;
  double d1 = 0.0;
  double gamma1 = 1.0;
  std::vector<double> lambda_grid;
  double lambda_max = 0.0;
  std::string method;
  int samples = 0;
  std::uint64_t seed = 0;
  double worst_residual = 0.0;  // max over samples of log ratio - envelope
  bool pass = false;
  std::string failure;
  int grid_n = 0;
};

UcpCertificate certify_ucp(const SensorFamily& fam, const TimeSet& E,
                           const GridSpace& g,
                           std::span<const double> lambda_grid, int trials,
                           double gamma1, double d1_min, std::uint64_t seed,
                           UcpMethod method = UcpMethod::automatic);

}  // namespace obsv
