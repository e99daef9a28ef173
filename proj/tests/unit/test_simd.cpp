#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "gradest/error.hpp"
#include "gradest/simd/kernels.hpp"

using namespace gradest;
using namespace gradest::simd;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) {
    x = dist(gen);
  }
  return v;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<Isa> vector_isas() {
  std::vector<Isa> out;
  for (const Isa isa : {Isa::avx2, Isa::neon}) {
    if (isa_available(isa)) {
      out.push_back(isa);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("scalar kernel is always available") {
  CHECK(isa_available(Isa::scalar));
  CHECK(&kernels_for(Isa::scalar) == &detail::scalar_table());
}

TEST_CASE("vector kernels match the scalar reference") {
  const auto isas = vector_isas();
  if (isas.empty()) {
    SKIP("no vector ISA on this host");
  }
  std::mt19937_64 gen(11);
  const auto& ref = kernels_for(Isa::scalar);
  for (const Isa isa : isas) {
    INFO(isa_name(isa));
    const auto& vec = kernels_for(isa);
    for (std::size_t n = 0; n <= 67; ++n) {
      INFO("n = " << n);
      const auto x = random_vector(n, gen);
      const auto y0 = random_vector(n, gen);
      const auto lo = random_vector(n, gen);
      const auto di = random_vector(n, gen);
      const auto up = random_vector(n, gen);

      auto y_ref = y0;
      auto y_vec = y0;
      ref.axpy(0.37, x.data(), y_ref.data(), n);
      vec.axpy(0.37, x.data(), y_vec.data(), n);
      CHECK(bit_equal(y_ref, y_vec));

      y_ref = y0;
      y_vec = y0;
      ref.axpby(-1.25, x.data(), 0.5, y_ref.data(), n);
      vec.axpby(-1.25, x.data(), 0.5, y_vec.data(), n);
      CHECK(bit_equal(y_ref, y_vec));

      y_ref = y0;
      y_vec = y0;
      ref.tridiag_apply(lo.data(), di.data(), up.data(), x.data(), y_ref.data(), n);
      vec.tridiag_apply(lo.data(), di.data(), up.data(), x.data(), y_vec.data(), n);
      CHECK(bit_equal(y_ref, y_vec));

      y_ref = y0;
      y_vec = y0;
      ref.squared_deviation(x.data(), di.data(), y_ref.data(), n);
      vec.squared_deviation(x.data(), di.data(), y_vec.data(), n);
      CHECK(bit_equal(y_ref, y_vec));

      const double d_ref = ref.dot(x.data(), y0.data(), n);
      const double d_vec = vec.dot(x.data(), y0.data(), n);
      double scale = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        scale += std::abs(x[i] * y0[i]);
      }
      CHECK(std::abs(d_ref - d_vec) <= 1e-14 * std::max(1.0, scale));
    }
  }
}

TEST_CASE("tridiag_apply leaves the end points alone") {
  for (const Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
    if (!isa_available(isa)) {
      continue;
    }
    const auto& k = kernels_for(isa);
    std::vector<double> lo(9, 1.0), di(9, -2.0), up(9, 1.0), x(9), y(9, 42.0);
    for (std::size_t i = 0; i < 9; ++i) {
      x[i] = static_cast<double>(i * i);
    }
    k.tridiag_apply(lo.data(), di.data(), up.data(), x.data(), y.data(), 9);
    CHECK(y[0] == 42.0);
    CHECK(y[8] == 42.0);
    for (std::size_t i = 1; i < 8; ++i) {
      CHECK(y[i] == 2.0);  // second difference of i^2
    }
  }
}

TEST_CASE("force_isa switches the active table") {
  const Isa before = active_isa();
  REQUIRE(force_isa(Isa::scalar));
  CHECK(active_isa() == Isa::scalar);
  CHECK(&kernels() == &detail::scalar_table());
  if (!isa_available(Isa::neon)) {
    CHECK_FALSE(force_isa(Isa::neon));
    CHECK(active_isa() == Isa::scalar);
  }
  force_isa(before);
  CHECK(active_isa() == before);
}

TEST_CASE("span front-ends check sizes") {
  std::vector<double> a(4, 1.0), b(5, 2.0);
  CHECK_THROWS_AS(axpy(1.0, a, b), InvalidArgument);
  CHECK_THROWS_AS(dot(a, b), InvalidArgument);
  std::vector<double> c(4, 2.0);
  axpy(0.5, a, c);
  CHECK(c[3] == 2.5);
  CHECK(dot(a, c) == 10.0);
}
