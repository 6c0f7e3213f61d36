#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace obsv::kernels {

using cplx = std::complex<double>;

// Elementwise and reduction kernels over interleaved complex arrays.
// The scalar table is the reference; SIMD variants must match it bitwise on
// the elementwise entries (no FMA, no contraction) and to ~1e-13 relative on
// the reductions (different association).
struct Backend {
  const char* name;
  // dst[i] = a[i] * b[i]
  void (*cmul)(cplx* dst, const cplx* a, const cplx* b, std::size_t n);
  // dst[i] = a[i] * w[i]  (real weights: masks, cutoff multipliers)
  void (*rmul)(cplx* dst, const cplx* a, const double* w, std::size_t n);
  // dst[i] = a[i] - b[i]
  void (*csub)(cplx* dst, const cplx* a, const cplx* b, std::size_t n);
  double (*sum_abs)(const cplx* a, std::size_t n);   // sum |a_i|
  double (*sum_sq)(const cplx* a, std::size_t n);    // sum |a_i|^2
  double (*max_abs)(const cplx* a, std::size_t n);   // max |a_i|
  double (*sum_abs_pow)(const cplx* a, double p, std::size_t n);
};

const Backend& scalar();

// nullptr when the build or the CPU lacks AVX2.
const Backend* avx2();

// Backend chosen at startup; honors OBSV_KERNELS=scalar|avx2.
const Backend& active();

std::vector<const Backend*> all_backends();

}  // namespace obsv::kernels
