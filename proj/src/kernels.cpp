#include "enslsr/kernels.hpp"

#include <cmath>

namespace enslsr::kernels {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc[0] += a[i] * b[i];
    acc[1] += a[i + 1] * b[i + 1];
    acc[2] += a[i + 2] * b[i + 2];
    acc[3] += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) acc[i % 4] += a[i] * b[i];
  return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

double sq_l2_scalar(const double* a, const double* b, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double d0 = a[i] - b[i];
    const double d1 = a[i + 1] - b[i + 1];
    const double d2 = a[i + 2] - b[i + 2];
    const double d3 = a[i + 3] - b[i + 3];
    acc[0] += d0 * d0;
    acc[1] += d1 * d1;
    acc[2] += d2 * d2;
    acc[3] += d3 * d3;
  }
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    acc[i % 4] += d * d;
  }
  return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

#if defined(__aarch64__)
#include <arm_neon.h>

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc01 = vdupq_n_f64(0.0);
  float64x2_t acc23 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc01 = vaddq_f64(acc01, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    acc23 = vaddq_f64(acc23, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double lane[4];
  vst1q_f64(lane, acc01);
  vst1q_f64(lane + 2, acc23);
  for (; i < n; ++i) lane[i % 4] += a[i] * b[i];
  return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

double sq_l2_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc01 = vdupq_n_f64(0.0);
  float64x2_t acc23 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float64x2_t d01 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    float64x2_t d23 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    acc01 = vaddq_f64(acc01, vmulq_f64(d01, d01));
    acc23 = vaddq_f64(acc23, vmulq_f64(d23, d23));
  }
  double lane[4];
  vst1q_f64(lane, acc01);
  vst1q_f64(lane + 2, acc23);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    lane[i % 4] += d * d;
  }
  return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

}  // namespace
#endif

namespace {

using KernelFn = double (*)(const double*, const double*, std::size_t);

struct Dispatch {
  KernelFn dot;
  KernelFn sq_l2;
  const char* name;
};

Dispatch select_backend() {
#if defined(__aarch64__)
  return {dot_neon, sq_l2_neon, "neon"};
#else
  if (has_avx2()) return {dot_avx2, sq_l2_avx2, "avx2"};
  return {dot_scalar, sq_l2_scalar, "scalar"};
#endif
}

const Dispatch& backend() {
  static const Dispatch d = select_backend();
  return d;
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  return backend().dot(a, b, n);
}

double sq_l2(const double* a, const double* b, std::size_t n) {
  return backend().sq_l2(a, b, n);
}

double l2(const double* a, const double* b, std::size_t n) {
  return std::sqrt(sq_l2(a, b, n));
}

std::size_t argmin_sq_l2(const double* q, const double* pts, std::size_t n_pts,
                         std::size_t d) {
  std::size_t best = 0;
  double best_d = sq_l2(q, pts, d);
  for (std::size_t i = 1; i < n_pts; ++i) {
    const double di = sq_l2(q, pts + i * d, d);
    if (di < best_d) {
      best_d = di;
      best = i;
    }
  }
  return best;
}

std::string active_backend() { return backend().name; }

}  // namespace enslsr::kernels
