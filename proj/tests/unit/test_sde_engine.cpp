#include <catch_amalgamated.hpp>

#include <cmath>

#include "gradest/error.hpp"
#include "gradest/instrumentation.hpp"
#include "gradest/sde_engine.hpp"
#include "support/frozen_values.hpp"

using namespace gradest;

namespace {

const SdeModel& sde(const BuiltinModel& b) {
  return *std::get<std::shared_ptr<const SdeModel>>(b.model);
}

// dX = c dt + s dB in one dimension.
std::shared_ptr<const SdeModel> constant_coefficients(double c, double s, double horizon = 1.0) {
  SdeCallbacks cb;
  cb.horizon = horizon;
  cb.drift = [c](double, std::span<const double>, const ParamVector&, std::vector<double>& o) {
    o.assign(1, c);
  };
  cb.volatility = [s](double, std::span<const double>, const ParamVector&,
                      std::vector<double>& o) { o.assign(1, s); };
  cb.terminal_reward = [](std::span<const double> x, const ParamVector&) { return x[0]; };
  cb.terminal_reward_gradient = [](std::span<const double>, const ParamVector&,
                                   std::vector<double>& o) { o.assign(1, 1.0); };
  return make_sde_model(cb);
}

// dX = A X dt in two dimensions.
std::shared_ptr<const SdeModel> linear_2d(std::vector<double> a) {
  SdeCallbacks cb;
  cb.state_dim = 2;
  cb.noise_dim = 1;
  cb.drift = [a](double, std::span<const double> x, const ParamVector&, std::vector<double>& o) {
    o = {a[0] * x[0] + a[1] * x[1], a[2] * x[0] + a[3] * x[1]};
  };
  cb.volatility = [](double, std::span<const double>, const ParamVector&,
                     std::vector<double>& o) { o.assign(2, 0.0); };
  cb.drift_jacobian = [a](double, std::span<const double>, const ParamVector&,
                          std::vector<double>& o) { o = a; };
  cb.terminal_reward = [](std::span<const double> x, const ParamVector&) { return x[0] + x[1]; };
  cb.terminal_reward_gradient = [](std::span<const double>, const ParamVector&,
                                   std::vector<double>& o) { o = {1.0, 1.0}; };
  return make_sde_model(cb);
}

// Brownian motion with g = x^2.
std::shared_ptr<const SdeModel> bm_square() {
  SdeCallbacks cb;
  cb.drift = [](double, std::span<const double>, const ParamVector&, std::vector<double>& o) {
    o.assign(1, 0.0);
  };
  cb.volatility = [](double, std::span<const double>, const ParamVector&,
                     std::vector<double>& o) { o.assign(1, 1.0); };
  cb.terminal_reward = [](std::span<const double> x, const ParamVector&) { return x[0] * x[0]; };
  cb.terminal_reward_gradient = [](std::span<const double> x, const ParamVector&,
                                   std::vector<double>& o) { o.assign(1, 2.0 * x[0]); };
  cb.terminal_reward_hessian = [](std::span<const double>, const ParamVector&,
                                  std::vector<double>& o) { o.assign(1, 2.0); };
  return make_sde_model(cb);
}

}  // namespace

TEST_CASE("time grid invariants") {
  CHECK_THROWS_AS(TimeGrid(1.0, 1.0, 4), InvalidArgument);
  CHECK_THROWS_AS(TimeGrid(0.0, 1.0, 0), InvalidArgument);
  const TimeGrid g(0.5, 1.0, 4);
  CHECK(g.dt() == 0.125);
  CHECK(g.time(2) == 0.75);
}

TEST_CASE("simulate_sde_path examples") {
  const ParamVector th{0.0};
  const double x0[1] = {0.25};
  SECTION("zero coefficients keep the path constant") {
    const auto m = constant_coefficients(0.0, 0.0);
    Stream s(1);
    const auto p = simulate_sde_path(*m, th, x0, TimeGrid(0.0, 1.0, 37), s);
    for (std::size_t k = 0; k <= 37; ++k) {
      CHECK(p.state(k)[0] == 0.25);
    }
  }
  SECTION("unit drift reaches x0 + 1") {
    const auto m = constant_coefficients(1.0, 0.0);
    for (const std::size_t steps : {1u, 2u, 64u, 256u, 1024u}) {
      Stream s(1);
      const auto p = simulate_sde_path(*m, th, x0, TimeGrid(0.0, 1.0, steps), s);
      CHECK(p.terminal_state()[0] == 1.25);
    }
    Stream s(1);
    const auto p = simulate_sde_path(*m, th, x0, TimeGrid(0.0, 1.0, 100), s);
    CHECK(p.terminal_state()[0] == Catch::Approx(1.25).epsilon(1e-14));
  }
  SECTION("initial state and increments are recorded") {
    const auto m = constant_coefficients(0.0, 1.0);
    Stream s(3);
    const auto p = simulate_sde_path(*m, th, x0, TimeGrid(0.0, 1.0, 8), s);
    CHECK(p.state(0)[0] == 0.25);
    CHECK(p.brownian_increments.size() == 8);
    double sum = 0.0;
    for (std::size_t k = 0; k < 8; ++k) {
      sum += p.increment(k)[0];
    }
    CHECK(p.terminal_state()[0] == Catch::Approx(0.25 + sum).margin(1e-14));
  }
}

TEST_CASE("OU terminal mean matches the closed form") {
  const auto built = builtin_model("ou");
  const ParamVector th(built.default_theta);
  const TimeGrid grid(0.0, 1.0, 256);
  const Stream root(17);
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < n; ++r) {
    Stream s = root.child(r);
    const double v = simulate_sde_path(sde(built), th, built.default_x0, grid, s).terminal_state()[0];
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / (n - 1));
  CHECK(std::abs(mean - std::exp(-1.0)) < 3.0 * se);
}

TEST_CASE("Brownian increments are N(0, dt)") {
  const auto m = constant_coefficients(0.0, 1.0, 2.0);
  const TimeGrid grid(0.0, 2.0, 16);
  Stream s(5);
  const double x0[1] = {0.0};
  double sum = 0.0, sum2 = 0.0, sum4 = 0.0;
  std::size_t count = 0;
  for (int r = 0; r < 20000; ++r) {
    const auto p = simulate_sde_path(*m, ParamVector{0.0}, x0, grid, s);
    for (const double db : p.brownian_increments) {
      sum += db;
      sum2 += db * db;
      sum4 += db * db * db * db;
      ++count;
    }
  }
  const double dt = grid.dt();
  CHECK(std::abs(sum / count) < 4.0 * std::sqrt(dt / count));
  CHECK(std::abs(sum2 / count - dt) < 4.0 * dt * std::sqrt(2.0 / count));
  CHECK(std::abs(sum4 / count - 3.0 * dt * dt) < 0.05 * 3.0 * dt * dt);
}

TEST_CASE("paths are bit-identical for the same stream") {
  const auto built = builtin_model("gbm");
  const ParamVector th(built.default_theta);
  Stream a = Stream(9).child(4);
  Stream b = Stream(9).child(4);
  const auto p = simulate_sde_path(sde(built), th, built.default_x0, TimeGrid(0, 1, 128), a);
  const auto q = simulate_sde_path(sde(built), th, built.default_x0, TimeGrid(0, 1, 128), b);
  CHECK(p.states == q.states);
  CHECK(p.brownian_increments == q.brownian_increments);
}

TEST_CASE("divergence reports the step") {
  SdeCallbacks cb;
  cb.drift = [](double, std::span<const double> x, const ParamVector&, std::vector<double>& o) {
    o.assign(1, x[0] * x[0] * 1e10);
  };
  cb.volatility = [](double, std::span<const double>, const ParamVector&,
                     std::vector<double>& o) { o.assign(1, 0.0); };
  const auto m = make_sde_model(cb);
  const double x0[1] = {1.0};
  Stream s(1);
  try {
    simulate_sde_path(*m, ParamVector{0.0}, x0, TimeGrid(0, 1, 100), s);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.step() > 0);
    CHECK(e.step() <= 100);
    CHECK(e.exit_code() == static_cast<int>(ErrorCategory::divergence));
  }
}

TEST_CASE("simulate_with_variations examples") {
  SECTION("state-independent coefficients give J = I and K = 0") {
    const auto m = constant_coefficients(0.3, 0.7);
    Stream s(2);
    const double x[1] = {1.0};
    const auto [path, var] = simulate_with_variations(*m, ParamVector{0.0}, x,
                                                      TimeGrid(0.25, 1.0, 50), s, 2);
    REQUIRE(var.has_second());
    for (std::size_t k = 0; k <= 50; ++k) {
      CHECK(var.jacobian(k)[0] == 1.0);
      CHECK(var.second_variation(k)[0] == 0.0);
    }
  }
  SECTION("GBM: J(T) = X(T) / x0 per path") {
    const auto built = builtin_model("gbm");
    const double x[1] = {1.7};
    for (std::uint64_t r = 0; r < 20; ++r) {
      Stream s = Stream(8).child(r);
      const auto [path, var] = simulate_with_variations(
          sde(built), ParamVector(built.default_theta), x, TimeGrid(0.0, 1.0, 256), s, 1);
      CHECK_FALSE(var.has_second());
      CHECK(var.jacobian(256)[0] ==
            Catch::Approx(path.terminal_state()[0] / 1.7).epsilon(1e-13));
    }
  }
  SECTION("linear 2-d drift: J(T) approaches the matrix exponential") {
    // A upper triangular with eigenvalues -1 and -1/2.
    const std::vector<double> a = {-1.0, 2.0, 0.0, -0.5};
    const auto m = linear_2d(a);
    const double x[2] = {1.0, -1.0};
    const double t0 = 0.25;
    const double tau = 1.0 - t0;
    const double e1 = std::exp(-tau);
    const double e2 = std::exp(-0.5 * tau);
    const double expected[4] = {e1, 4.0 * (e2 - e1), 0.0, e2};
    Stream s(1);
    const auto [path, var] =
        simulate_with_variations(*m, ParamVector{0.0}, x, TimeGrid(t0, 1.0, 4096), s, 2);
    const auto j = var.jacobian(4096);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 4; ++i) {
      num += (j[i] - expected[i]) * (j[i] - expected[i]);
      den += expected[i] * expected[i];
    }
    CHECK(std::sqrt(num / den) <= 1e-2);
    for (const double k : var.second_variation(4096)) {
      CHECK(k == 0.0);
    }
  }
  SECTION("order must be 1 or 2") {
    const auto m = constant_coefficients(0.0, 1.0);
    Stream s(1);
    const double x[1] = {0.0};
    CHECK_THROWS_AS(simulate_with_variations(*m, ParamVector{0.0}, x, TimeGrid(0, 1, 4), s, 3),
                    InvalidArgument);
  }
}

TEST_CASE("second variation matches a finite difference of the first") {
  // For fixed noise, K(T) is the x-derivative of J(T).
  const auto built = builtin_model("feature-drift");
  const auto& m = sde(built);
  const ParamVector th(built.default_theta);
  const double h = 1e-5;
  const double x[1] = {0.3};
  const double xp[1] = {0.3 + h};
  const double xm[1] = {0.3 - h};
  const TimeGrid grid(0.0, 1.0, 64);
  Stream s0(4), s1(4), s2(4);
  const auto base = simulate_with_variations(m, th, x, grid, s0, 2).second;
  const auto up = simulate_with_variations(m, th, xp, grid, s1, 1).second;
  const auto down = simulate_with_variations(m, th, xm, grid, s2, 1).second;
  const double fd = (up.jacobian(64)[0] - down.jacobian(64)[0]) / (2 * h);
  CHECK(base.second_variation(64)[0] == Catch::Approx(fd).epsilon(1e-5).margin(1e-7));
}

TEST_CASE("estimate_value_derivatives_at examples") {
  SECTION("linear dynamics with linear reward have zero Hessian") {
    const auto m = linear_2d({-1.0, 0.5, 0.2, -0.3});
    Stream s(1);
    const double x[2] = {0.4, 0.1};
    const auto vd = estimate_value_derivatives_at(*m, ParamVector{0.0}, 0.0, x, 8, 32, s);
    for (const double h : vd.hessian) {
      CHECK(h == 0.0);
    }
  }
  SECTION("Brownian motion with g = x^2") {
    const auto m = bm_square();
    Stream s(12);
    const double x[1] = {0.7};
    const auto vd = estimate_value_derivatives_at(*m, ParamVector{0.0}, 0.2, x, 4000, 32, s);
    CHECK(std::abs(vd.gradient[0] - 1.4) <= 3.0 * vd.gradient_stderr[0]);
    CHECK(vd.hessian[0] == 2.0);
    CHECK(vd.hessian_stderr[0] == 0.0);
  }
  SECTION("OU with g = x^2") {
    const auto built = builtin_model("ou");
    Stream s(21);
    const double x[1] = {1.0};
    const auto vd = estimate_value_derivatives_at(sde(built), ParamVector(built.default_theta),
                                                  0.0, x, 10000, 256, s);
    // On the Euler grid the target is 2 x (1 - dt)^(2N); the continuum value
    // differs by far less than the tolerance.
    CHECK(std::abs(vd.gradient[0] - testing::kOuDx) <= 3.0 * vd.gradient_stderr[0]);
    CHECK(vd.hessian[0] > 0.0);
  }
  SECTION("counts calls") {
    instrumentation::reset();
    const auto m = bm_square();
    Stream s(1);
    const double x[1] = {0.0};
    estimate_value_derivatives_at(*m, ParamVector{0.0}, 0.0, x, 3, 4, s);
    CHECK(instrumentation::counters().value_derivative_calls.load() == 1);
    CHECK_THROWS_AS(estimate_value_derivatives_at(*m, ParamVector{0.0}, 1.0, x, 3, 4, s),
                    InvalidArgument);
    CHECK_THROWS_AS(estimate_value_derivatives_at(*m, ParamVector{0.0}, 0.0, x, 0, 4, s),
                    InvalidArgument);
  }
}

TEST_CASE("Euler weak order is one on OU", "[.][weak-order]") {
  const auto built = builtin_model("ou");
  const ParamVector th(built.default_theta);
  const double x0[1] = {10.0};
  const double exact = 10.0 * std::exp(-1.0);
  const std::size_t paths = 1000000;
  std::vector<double> log_dt, log_err;
  for (const std::size_t steps : {64u, 256u, 1024u}) {
    const Stream root(1000 + steps);
    const TimeGrid grid(0.0, 1.0, steps);
    double sum = 0.0;
    for (std::size_t r = 0; r < paths; ++r) {
      Stream s = root.child(r);
      sum += simulate_sde_path(sde(built), th, x0, grid, s).terminal_state()[0];
    }
    const double err = std::abs(sum / paths - exact);
    log_dt.push_back(std::log(grid.dt()));
    log_err.push_back(std::log(err));
    UNSCOPED_INFO("steps " << steps << " error " << err);
  }
  const double mx = (log_dt[0] + log_dt[1] + log_dt[2]) / 3.0;
  const double my = (log_err[0] + log_err[1] + log_err[2]) / 3.0;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 3; ++i) {
    sxy += (log_dt[i] - mx) * (log_err[i] - my);
    sxx += (log_dt[i] - mx) * (log_dt[i] - mx);
  }
  const double slope = sxy / sxx;
  INFO("fitted slope " << slope);
  CHECK(slope >= 0.7);
  CHECK(slope <= 1.3);
}
