#include "obsv/fft.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace obsv {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }
}  // namespace

void fft(std::complex<double>* data, std::size_t n, bool inverse) {
  if (!is_pow2(n)) throw std::invalid_argument("fft: size must be a power of two");
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = (inverse ? kTwoPi : -kTwoPi) / static_cast<double>(len);
    const std::size_t half = len >> 1;
    std::vector<std::complex<double>> twiddle(half);
    for (std::size_t k = 0; k < half; ++k) {
      const double a = angle * static_cast<double>(k);
      twiddle[k] = {std::cos(a), std::sin(a)};
    }
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const std::complex<double> even = data[start + k];
        const std::complex<double> odd = data[start + k + half] * twiddle[k];
        data[start + k] = even + odd;
        data[start + k + half] = even - odd;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) data[i] *= scale;
  }
}

void fft2d(std::complex<double>* data, std::size_t rows, std::size_t cols,
           bool inverse) {
  for (std::size_t r = 0; r < rows; ++r) fft(data + r * cols, cols, inverse);
  std::vector<std::complex<double>> column(rows);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows; ++r) column[r] = data[r * cols + c];
    fft(column.data(), rows, inverse);
    for (std::size_t r = 0; r < rows; ++r) data[r * cols + c] = column[r];
  }
}

}  // namespace obsv
