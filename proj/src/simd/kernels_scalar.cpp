#include "gradest/simd/kernels.hpp"

namespace gradest::simd::detail {
namespace {

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = y[i] + alpha * x[i];
  }
}

void axpby_scalar(double a, const double* x, double b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = a * x[i] + b * y[i];
  }
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += x[i] * y[i];
  }
  return sum;
}

void tridiag_apply_scalar(const double* lower, const double* diag, const double* upper,
                          const double* x, double* y, std::size_t n) {
  for (std::size_t i = 1; i + 1 < n; ++i) {
    y[i] = lower[i] * x[i - 1] + diag[i] * x[i] + upper[i] * x[i + 1];
  }
}

void squared_deviation_scalar(const double* x, const double* mean, double* acc,
                              std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = x[i] - mean[i];
    acc[i] = acc[i] + dev * dev;
  }
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{axpy_scalar, axpby_scalar, dot_scalar,
                                 tridiag_apply_scalar, squared_deviation_scalar};
  return table;
}

}  // namespace gradest::simd::detail
