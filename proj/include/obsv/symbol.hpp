#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "obsv/grid.hpp"

namespace obsv {

// Time-dependent polynomial symbol  a(t,xi) = sum_{|alpha|<=m} a_alpha(t) (i xi)^alpha
// with piecewise-constant coefficients on a declared time mesh. Piecewise
// constancy keeps the accumulated integral of the symbol in closed form, so
// the evolution-family algebra holds to machine precision.
struct EllipticSymbol {
  int dim = 1;                  // spatial dimension (1 or 2)
  int degree = 2;               // m >= 2
  std::vector<double> mesh;     // 0 = t_0 < ... < t_K = T
  struct Term {
    std::array<int, 2> alpha{0, 0};   // second entry 0 in 1-D
    std::vector<cplx> values;         // one coefficient per mesh piece
  };
  std::vector<Term> terms;
  double ellipticity = 1.0;     // declared constant c > 0

  int pieces() const { return static_cast<int>(mesh.size()) - 1; }
  int piece_of(double t) const;     // [t_k, t_{k+1}) with the last piece closed
  double horizon() const { return mesh.back(); }

  // a(t,xi) on a mesh piece
  cplx value(int piece, std::array<int, 2> xi) const;
  // principal part only (|alpha| = m)
  cplx principal(int piece, std::array<int, 2> xi) const;

  void validate() const;
};

// a(t,xi) = diffusivity * |xi|^2 (1-D: a_2 = -diffusivity)
EllipticSymbol heat_symbol(double horizon, double diffusivity = 1.0);
// a(t,xi) = theta(t) |xi|^degree with theta piecewise on the given mesh
EllipticSymbol modulated_symbol(double horizon, int degree,
                                std::vector<double> mesh,
                                std::vector<double> theta);

struct EllipticityCertificate {
  int degree = 0;
  double c = 0.0;    // largest certified constant over grid and mesh pieces
  bool pass = false;
  std::string reason;
};

// Checks Re(principal part) >= c |xi|^degree on every nonzero grid frequency
// and every mesh piece; reports the largest certified c.
EllipticityCertificate check_ellipticity(const EllipticSymbol& sym,
                                         const GridSpace& g);

// Largest c with Re a(t,xi) >= c |xi|^degree for the full symbol on the grid
// (the analytic dissipation slope for p = 2); can be <= 0.
double full_symbol_decay(const EllipticSymbol& sym, const GridSpace& g);

}  // namespace obsv
