#include <atomic>
#include <cstdlib>
#include <string_view>

#include "gradest/error.hpp"
#include "gradest/simd/kernels.hpp"

namespace gradest::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(GRADEST_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Isa detect() noexcept {
  if (const char* env = std::getenv("GRADEST_ISA")) {
    const std::string_view want(env);
    if (want == "scalar") {
      return Isa::scalar;
    }
    if (want == "avx2" && isa_available(Isa::avx2)) {
      return Isa::avx2;
    }
    if (want == "neon" && isa_available(Isa::neon)) {
      return Isa::neon;
    }
  }
  if (isa_available(Isa::avx2)) {
    return Isa::avx2;
  }
  if (isa_available(Isa::neon)) {
    return Isa::neon;
  }
  return Isa::scalar;
}

std::atomic<const KernelTable*>& active_table() noexcept {
  static std::atomic<const KernelTable*> table{&kernels_for(detect())};
  return table;
}

std::atomic<Isa>& active_isa_slot() noexcept {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

void check_same_size(std::size_t a, std::size_t b) {
  if (a != b) {
    throw InvalidArgument("kernel operands differ in length: " + std::to_string(a) +
                          " vs " + std::to_string(b));
  }
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
      return detail::avx2_table() != nullptr && cpu_has_avx2();
    case Isa::neon:
      return detail::neon_table() != nullptr;
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) noexcept {
  if (isa == Isa::avx2 && isa_available(Isa::avx2)) {
    return *detail::avx2_table();
  }
  if (isa == Isa::neon && isa_available(Isa::neon)) {
    return *detail::neon_table();
  }
  return detail::scalar_table();
}

Isa active_isa() noexcept { return active_isa_slot().load(std::memory_order_relaxed); }

const KernelTable& kernels() noexcept {
  return *active_table().load(std::memory_order_relaxed);
}

bool force_isa(Isa isa) noexcept {
  if (!isa_available(isa)) {
    return false;
  }
  active_table().store(&kernels_for(isa), std::memory_order_relaxed);
  active_isa_slot().store(isa, std::memory_order_relaxed);
  return true;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_same_size(x.size(), y.size());
  kernels().axpy(alpha, x.data(), y.data(), x.size());
}

void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
  check_same_size(x.size(), y.size());
  kernels().axpby(a, x.data(), b, y.data(), x.size());
}

double dot(std::span<const double> x, std::span<const double> y) {
  check_same_size(x.size(), y.size());
  return kernels().dot(x.data(), y.data(), x.size());
}

void tridiag_apply(std::span<const double> lower, std::span<const double> diag,
                   std::span<const double> upper, std::span<const double> x,
                   std::span<double> y) {
  check_same_size(lower.size(), x.size());
  check_same_size(diag.size(), x.size());
  check_same_size(upper.size(), x.size());
  check_same_size(y.size(), x.size());
  kernels().tridiag_apply(lower.data(), diag.data(), upper.data(), x.data(), y.data(),
                          x.size());
}

void squared_deviation(std::span<const double> x, std::span<const double> mean,
                       std::span<double> acc) {
  check_same_size(x.size(), mean.size());
  check_same_size(x.size(), acc.size());
  kernels().squared_deviation(x.data(), mean.data(), acc.data(), x.size());
}

}  // namespace gradest::simd
