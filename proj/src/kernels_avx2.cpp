#include "enslsr/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace enslsr::kernels {

bool has_avx2() { return __builtin_cpu_supports("avx2"); }

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                           _mm256_loadu_pd(b + i)));
  }
  double lane[4];
  _mm256_storeu_pd(lane, acc);
  for (; i < n; ++i) lane[i % 4] += a[i] * b[i];
  return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

double sq_l2_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double lane[4];
  _mm256_storeu_pd(lane, acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    lane[i % 4] += d * d;
  }
  return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

}  // namespace enslsr::kernels

#else

namespace enslsr::kernels {

bool has_avx2() { return false; }
double dot_avx2(const double* a, const double* b, std::size_t n) {
  return dot_scalar(a, b, n);
}
double sq_l2_avx2(const double* a, const double* b, std::size_t n) {
  return sq_l2_scalar(a, b, n);
}

}  // namespace enslsr::kernels

#endif
