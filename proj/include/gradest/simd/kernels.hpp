#pragma once

// Data-parallel inner loops shared by the engines, estimators and oracle.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 (x86-64) or NEON (AArch64) variant. The variant is
// picked once at first use from the running CPU; GRADEST_ISA=scalar|avx2|neon
// in the environment or force_isa() overrides the choice.
//
// Element-wise kernels (axpy, axpby, tridiag_apply, squared_deviation) use
// separate multiply and add in every variant, so all variants agree bit for
// bit. Reductions (dot) reassociate the sum and agree to rounding only.

#include <cstddef>
#include <span>
#include <string_view>

namespace gradest::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;

struct KernelTable {
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y[i] = a * x[i] + b * y[i]
  void (*axpby)(double a, const double* x, double b, double* y, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] = lower[i] * x[i-1] + diag[i] * x[i] + upper[i] * x[i+1] for
  // 0 < i < n-1. y[0] and y[n-1] are left untouched.
  void (*tridiag_apply)(const double* lower, const double* diag, const double* upper,
                        const double* x, double* y, std::size_t n);
  // acc[i] += (x[i] - mean[i])^2
  void (*squared_deviation)(const double* x, const double* mean, double* acc,
                            std::size_t n);
};

bool isa_available(Isa isa) noexcept;

/// Table for a specific ISA; falls back to scalar when `isa` is unavailable.
const KernelTable& kernels_for(Isa isa) noexcept;

Isa active_isa() noexcept;
const KernelTable& kernels() noexcept;

/// Returns false (and changes nothing) when `isa` is not available here.
bool force_isa(Isa isa) noexcept;

// Span front-ends over the active table. Sizes must match.

void axpy(double alpha, std::span<const double> x, std::span<double> y);
void axpby(double a, std::span<const double> x, double b, std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
void tridiag_apply(std::span<const double> lower, std::span<const double> diag,
                   std::span<const double> upper, std::span<const double> x,
                   std::span<double> y);
void squared_deviation(std::span<const double> x, std::span<const double> mean,
                       std::span<double> acc);

namespace detail {
const KernelTable& scalar_table() noexcept;
const KernelTable* avx2_table() noexcept;  // nullptr when not compiled in
const KernelTable* neon_table() noexcept;
}  // namespace detail

}  // namespace gradest::simd
