#include "spslab/simd.hpp"

namespace spslab::simd {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void matvec_scalar(const double* a, const double* x, double* y, std::size_t m) {
  for (std::size_t i = 0; i < m; ++i) y[i] = dot_scalar(a + i * m, x, m);
}

}  // namespace

const Backend& scalar_backend() {
  static const Backend b{"scalar", dot_scalar, matvec_scalar};
  return b;
}

}  // namespace spslab::simd
