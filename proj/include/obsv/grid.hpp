#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "obsv/rng.hpp"

namespace obsv {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// 1/p with the convention 1/inf = 0.
inline double reciprocal_exponent(double p) {
  return std::isinf(p) ? 0.0 : 1.0 / p;
}

// Discretized torus [0,2pi)^d, N points per axis. Discrete L^p norms carry
// the cell-volume weight (2pi/N)^d so the constant field 1 has norm
// (2pi)^{d/p} for every p.
struct GridSpace {
  int dim = 1;       // 1 or 2
  int n = 256;       // points per axis, power of two
  double p = 2.0;    // norm exponent, kInf allowed

  std::size_t size() const {
    return dim == 1 ? static_cast<std::size_t>(n)
                    : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  }
  double side() const { return 6.283185307179586476925286766559; }
  double spacing() const { return side() / n; }
  double cell_volume() const {
    const double h = spacing();
    return dim == 1 ? h : h * h;
  }
  // axis index -> signed frequency in [-n/2, n/2)
  int freq(int idx) const { return idx < n / 2 ? idx : idx - n; }
  // flat index -> frequency vector (second entry 0 in 1-D)
  std::array<int, 2> freq_vec(std::size_t flat) const {
    if (dim == 1) return {freq(static_cast<int>(flat)), 0};
    const int i = static_cast<int>(flat / static_cast<std::size_t>(n));
    const int j = static_cast<int>(flat % static_cast<std::size_t>(n));
    return {freq(i), freq(j)};
  }
  double freq_abs(std::size_t flat) const {
    const auto k = freq_vec(flat);
    return std::sqrt(static_cast<double>(k[0]) * k[0] +
                     static_cast<double>(k[1]) * k[1]);
  }
  // grid point coordinates of a flat index
  std::array<double, 2> point(std::size_t flat) const {
    const double h = spacing();
    if (dim == 1) return {h * static_cast<double>(flat), 0.0};
    const auto i = flat / static_cast<std::size_t>(n);
    const auto j = flat % static_cast<std::size_t>(n);
    return {h * static_cast<double>(i), h * static_cast<double>(j)};
  }
  bool compatible(const GridSpace& other) const {
    return dim == other.dim && n == other.n;
  }

  double norm(std::span<const cplx> x) const;
  void validate() const;
};

struct Field {
  GridSpace space;
  std::vector<cplx> data;

  double norm() const { return space.norm(data); }
};

Field zero_field(const GridSpace& g);
Field constant_field(const GridSpace& g, cplx value);
// e^{i k.x} sampled on the grid
Field mode_field(const GridSpace& g, std::array<int, 2> k);
// iid complex gaussian per grid point
Field random_field(const GridSpace& g, Rng& rng);
// random combination of modes with |xi| <= lambda (range of the sharp cutoff)
Field random_bandlimited(const GridSpace& g, double lambda, Rng& rng);

// forward/inverse transforms between physical samples and mode coefficients;
// spectrum uses the same layout as the field, inverse of spectrum(x) is x.
std::vector<cplx> spectrum(const Field& x);
Field from_spectrum(const GridSpace& g, std::vector<cplx> coeffs);

}  // namespace obsv
