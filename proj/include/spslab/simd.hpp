#pragma once

#include <cstddef>

namespace spslab::simd {

// Dense kernels behind a runtime-selected backend. The scalar backend is the
// reference; vector backends are checked against it in the tests.
struct Backend {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y = A x for a row-major m x m matrix.
  void (*matvec)(const double* a, const double* x, double* y, std::size_t m);
};

const Backend& scalar_backend();
// nullptr when the build or the CPU lacks AVX2/FMA.
const Backend* avx2_backend();

// Chosen once per process; SPSLAB_SIMD=scalar forces the reference path.
const Backend& active();

inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline void matvec(const double* a, const double* x, double* y, std::size_t m) {
  active().matvec(a, x, y, m);
}

}  // namespace spslab::simd
