#pragma once

#include <complex>
#include <cstddef>

namespace obsv {

// In-place iterative radix-2 complex FFT, n a power of two.
// Forward uses the e^{-i k x} convention; inverse divides by n.
void fft(std::complex<double>* data, std::size_t n, bool inverse);

// Row-major rows x cols transform (rows first, then columns).
void fft2d(std::complex<double>* data, std::size_t rows, std::size_t cols,
           bool inverse);

}  // namespace obsv
