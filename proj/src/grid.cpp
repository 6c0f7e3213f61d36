#include "obsv/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "obsv/fft.hpp"
#include "obsv/kernels.hpp"

namespace obsv {

void GridSpace::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("grid: dim must be 1 or 2");
  if (n < 2 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("grid: N must be a power of two >= 2");
  }
  if (!(p >= 1.0)) throw std::invalid_argument("grid: norm exponent must be >= 1");
}

double GridSpace::norm(std::span<const cplx> x) const {
  const auto& k = kernels::active();
  const std::size_t count = x.size();
  if (std::isinf(p)) return k.max_abs(x.data(), count);
  const double w = cell_volume();
  if (p == 1.0) return w * k.sum_abs(x.data(), count);
  if (p == 2.0) return std::sqrt(w * k.sum_sq(x.data(), count));
  return std::pow(w * k.sum_abs_pow(x.data(), p, count), 1.0 / p);
}

Field zero_field(const GridSpace& g) { return {g, std::vector<cplx>(g.size())}; }

Field constant_field(const GridSpace& g, cplx value) {
  return {g, std::vector<cplx>(g.size(), value)};
}

Field mode_field(const GridSpace& g, std::array<int, 2> kvec) {
  Field out = zero_field(g);
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    const auto x = g.point(i);
    const double phase = kvec[0] * x[0] + kvec[1] * x[1];
    out.data[i] = {std::cos(phase), std::sin(phase)};
  }
  return out;
}

Field random_field(const GridSpace& g, Rng& rng) {
  Field out = zero_field(g);
  for (auto& v : out.data) v = rng.cnormal();
  return out;
}

Field random_bandlimited(const GridSpace& g, double lambda, Rng& rng) {
  std::vector<cplx> coeffs(g.size());
  bool any = false;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (g.freq_abs(i) <= lambda) {
      coeffs[i] = rng.cnormal();
      any = true;
    }
  }
  if (!any) coeffs[0] = rng.cnormal();  // lambda below the lowest mode
  return from_spectrum(g, std::move(coeffs));
}

std::vector<cplx> spectrum(const Field& x) {
  std::vector<cplx> coeffs(x.data);
  const int n = x.space.n;
  if (x.space.dim == 1) {
    fft(coeffs.data(), coeffs.size(), false);
  } else {
    fft2d(coeffs.data(), n, n, false);
  }
  const double scale = 1.0 / static_cast<double>(x.space.size());
  for (auto& c : coeffs) c *= scale;
  return coeffs;
}

Field from_spectrum(const GridSpace& g, std::vector<cplx> coeffs) {
  if (coeffs.size() != g.size()) {
    throw std::invalid_argument("from_spectrum: size mismatch");
  }
  const double scale = static_cast<double>(g.size());
  for (auto& c : coeffs) c *= scale;
  if (g.dim == 1) {
    fft(coeffs.data(), coeffs.size(), true);
  } else {
    fft2d(coeffs.data(), g.n, g.n, true);
  }
  return {g, std::move(coeffs)};
}

}  // namespace obsv
