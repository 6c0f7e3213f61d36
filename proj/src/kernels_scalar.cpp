#include "obsv/kernels.hpp"

#include <cmath>

// Reference kernels. Complex arithmetic is spelled out on raw doubles so the
// SIMD variants can reproduce it operation for operation.

namespace obsv::kernels {
namespace {

void cmul_scalar(cplx* dst, const cplx* a, const cplx* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  double* pd = reinterpret_cast<double*>(dst);
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = pa[2 * i], ai = pa[2 * i + 1];
    const double br = pb[2 * i], bi = pb[2 * i + 1];
    pd[2 * i] = ar * br - ai * bi;
    pd[2 * i + 1] = ar * bi + ai * br;
  }
}

void rmul_scalar(cplx* dst, const cplx* a, const double* w, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  double* pd = reinterpret_cast<double*>(dst);
  for (std::size_t i = 0; i < n; ++i) {
    pd[2 * i] = pa[2 * i] * w[i];
    pd[2 * i + 1] = pa[2 * i + 1] * w[i];
  }
}

void csub_scalar(cplx* dst, const cplx* a, const cplx* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  double* pd = reinterpret_cast<double*>(dst);
  for (std::size_t i = 0; i < 2 * n; ++i) pd[i] = pa[i] - pb[i];
}

double sum_abs_scalar(const cplx* a, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double re = pa[2 * i], im = pa[2 * i + 1];
    acc += std::sqrt(re * re + im * im);
  }
  return acc;
}

double sum_sq_scalar(const cplx* a, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double re = pa[2 * i], im = pa[2 * i + 1];
    acc += re * re + im * im;
  }
  return acc;
}

double max_abs_scalar(const cplx* a, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double re = pa[2 * i], im = pa[2 * i + 1];
    const double sq = re * re + im * im;
    if (sq > best) best = sq;
  }
  return std::sqrt(best);
}

double sum_abs_pow_scalar(const cplx* a, double p, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double re = pa[2 * i], im = pa[2 * i + 1];
    const double mag = std::sqrt(re * re + im * im);
    acc += std::pow(mag, p);
  }
  return acc;
}

}  // namespace

const Backend& scalar() {
  static const Backend table{
      "scalar",     cmul_scalar,   rmul_scalar,    csub_scalar,
      sum_abs_scalar, sum_sq_scalar, max_abs_scalar, sum_abs_pow_scalar,
  };
  return table;
}

}  // namespace obsv::kernels
