#include "obsv/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace obsv::kernels {

namespace {

const Backend& pick() {
  const char* want = std::getenv("OBSV_KERNELS");
  if (want != nullptr && std::strcmp(want, "scalar") == 0) return scalar();
  const Backend* simd = avx2();
  if (want != nullptr && std::strcmp(want, "avx2") == 0 && simd != nullptr) {
    return *simd;
  }
  if (want != nullptr && std::strcmp(want, "avx2") != 0 &&
      std::strcmp(want, "scalar") != 0) {
    return scalar();  // unknown selector, stay on the reference path
  }
  return simd != nullptr ? *simd : scalar();
}

}  // namespace

const Backend& active() {
  static const Backend& chosen = pick();
  return chosen;
}

std::vector<const Backend*> all_backends() {
  std::vector<const Backend*> out{&scalar()};
  if (const Backend* simd = avx2()) out.push_back(simd);
  return out;
}

}  // namespace obsv::kernels
