#include "spslab/simd.hpp"

#if defined(SPSLAB_HAVE_AVX2)
#include <immintrin.h>
#endif

namespace spslab::simd {

#if defined(SPSLAB_HAVE_AVX2)

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd(), s3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
    s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), s2);
    s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), s3);
  }
  for (; i + 4 <= n; i += 4)
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
  double s = hsum(_mm256_add_pd(_mm256_add_pd(s0, s1), _mm256_add_pd(s2, s3)));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

// Two rows per pass so each load of x feeds two FMAs.
void matvec_avx2(const double* a, const double* x, double* y, std::size_t m) {
  std::size_t i = 0;
  for (; i + 2 <= m; i += 2) {
    const double* r0 = a + i * m;
    const double* r1 = r0 + m;
    __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
    __m256d b0 = _mm256_setzero_pd(), b1 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 8 <= m; j += 8) {
      __m256d x0 = _mm256_loadu_pd(x + j), x1 = _mm256_loadu_pd(x + j + 4);
      a0 = _mm256_fmadd_pd(_mm256_loadu_pd(r0 + j), x0, a0);
      a1 = _mm256_fmadd_pd(_mm256_loadu_pd(r0 + j + 4), x1, a1);
      b0 = _mm256_fmadd_pd(_mm256_loadu_pd(r1 + j), x0, b0);
      b1 = _mm256_fmadd_pd(_mm256_loadu_pd(r1 + j + 4), x1, b1);
    }
    double s0 = hsum(_mm256_add_pd(a0, a1));
    double s1 = hsum(_mm256_add_pd(b0, b1));
    for (; j < m; ++j) {
      s0 += r0[j] * x[j];
      s1 += r1[j] * x[j];
    }
    y[i] = s0;
    y[i + 1] = s1;
  }
  for (; i < m; ++i) y[i] = dot_avx2(a + i * m, x, m);
}

}  // namespace

const Backend* avx2_backend() {
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  static const Backend b{"avx2", dot_avx2, matvec_avx2};
  return ok ? &b : nullptr;
}

#else

const Backend* avx2_backend() { return nullptr; }

#endif

}  // namespace spslab::simd
