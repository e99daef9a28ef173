// Compiled with -mavx2 only when the target is x86-64; selected at runtime
// after a CPUID check, so nothing here runs on CPUs without AVX2.

#include "gradest/simd/kernels.hpp"

#if defined(GRADEST_HAVE_AVX2)

#include <immintrin.h>

namespace gradest::simd::detail {
namespace {

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(a, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) {
    y[i] = y[i] + alpha * x[i];
  }
}

void axpby_avx2(double a, const double* x, double b, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ax = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    const __m256d by = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(ax, by));
  }
  for (; i < n; ++i) {
    y[i] = a * x[i] + b * y[i];
  }
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(x + i + 4),
                                             _mm256_loadu_pd(y + i + 4)));
  }
  if (i + 4 <= n) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    i += 4;
  }
  const __m256d acc = _mm256_add_pd(acc0, acc1);
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  double sum = _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
  for (; i < n; ++i) {
    sum += x[i] * y[i];
  }
  return sum;
}

void tridiag_apply_avx2(const double* lower, const double* diag, const double* upper,
                        const double* x, double* y, std::size_t n) {
  if (n < 3) {
    return;
  }
  std::size_t i = 1;
  for (; i + 4 <= n - 1; i += 4) {
    const __m256d left = _mm256_mul_pd(_mm256_loadu_pd(lower + i), _mm256_loadu_pd(x + i - 1));
    const __m256d mid = _mm256_mul_pd(_mm256_loadu_pd(diag + i), _mm256_loadu_pd(x + i));
    const __m256d right = _mm256_mul_pd(_mm256_loadu_pd(upper + i), _mm256_loadu_pd(x + i + 1));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_add_pd(left, mid), right));
  }
  for (; i + 1 < n; ++i) {
    y[i] = lower[i] * x[i - 1] + diag[i] * x[i] + upper[i] * x[i + 1];
  }
}

void squared_deviation_avx2(const double* x, const double* mean, double* acc,
                            std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dev = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(mean + i));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_mul_pd(dev, dev)));
  }
  for (; i < n; ++i) {
    const double dev = x[i] - mean[i];
    acc[i] = acc[i] + dev * dev;
  }
}

}  // namespace

const KernelTable* avx2_table() noexcept {
  static const KernelTable table{axpy_avx2, axpby_avx2, dot_avx2, tridiag_apply_avx2,
                                 squared_deviation_avx2};
  return &table;
}

}  // namespace gradest::simd::detail

#else

namespace gradest::simd::detail {
const KernelTable* avx2_table() noexcept { return nullptr; }
}  // namespace gradest::simd::detail

#endif
