#include "gradest/simd/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

namespace gradest::simd::detail {
namespace {

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t a = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t prod = vmulq_f64(a, vld1q_f64(x + i));
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), prod));
  }
  for (; i < n; ++i) {
    y[i] = y[i] + alpha * x[i];
  }
}

void axpby_neon(double a, const double* x, double b, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  const float64x2_t vb = vdupq_n_f64(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t ax = vmulq_f64(va, vld1q_f64(x + i));
    const float64x2_t by = vmulq_f64(vb, vld1q_f64(y + i));
    vst1q_f64(y + i, vaddq_f64(ax, by));
  }
  for (; i < n; ++i) {
    y[i] = a * x[i] + b * y[i];
  }
}

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  }
  double sum = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) {
    sum += x[i] * y[i];
  }
  return sum;
}

void tridiag_apply_neon(const double* lower, const double* diag, const double* upper,
                        const double* x, double* y, std::size_t n) {
  if (n < 3) {
    return;
  }
  std::size_t i = 1;
  for (; i + 2 <= n - 1; i += 2) {
    const float64x2_t left = vmulq_f64(vld1q_f64(lower + i), vld1q_f64(x + i - 1));
    const float64x2_t mid = vmulq_f64(vld1q_f64(diag + i), vld1q_f64(x + i));
    const float64x2_t right = vmulq_f64(vld1q_f64(upper + i), vld1q_f64(x + i + 1));
    vst1q_f64(y + i, vaddq_f64(vaddq_f64(left, mid), right));
  }
  for (; i + 1 < n; ++i) {
    y[i] = lower[i] * x[i - 1] + diag[i] * x[i] + upper[i] * x[i + 1];
  }
}

void squared_deviation_neon(const double* x, const double* mean, double* acc,
                            std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t dev = vsubq_f64(vld1q_f64(x + i), vld1q_f64(mean + i));
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vmulq_f64(dev, dev)));
  }
  for (; i < n; ++i) {
    const double dev = x[i] - mean[i];
    acc[i] = acc[i] + dev * dev;
  }
}

}  // namespace

const KernelTable* neon_table() noexcept {
  static const KernelTable table{axpy_neon, axpby_neon, dot_neon, tridiag_apply_neon,
                                 squared_deviation_neon};
  return &table;
}

}  // namespace gradest::simd::detail

#else

namespace gradest::simd::detail {
const KernelTable* neon_table() noexcept { return nullptr; }
}  // namespace gradest::simd::detail

#endif
