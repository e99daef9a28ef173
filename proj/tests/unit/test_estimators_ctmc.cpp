#include <catch_amalgamated.hpp>

#include <cmath>
#include <functional>

#include "gradest/error.hpp"
#include "gradest/estimators_ctmc.hpp"
#include "gradest/instrumentation.hpp"
#include "gradest/oracle.hpp"
#include "support/frozen_values.hpp"

using namespace gradest;

namespace {

const CrnModel& crn(const BuiltinModel& b) {
  return *std::get<std::shared_ptr<const CrnModel>>(b.model);
}

struct Summary {
  std::vector<double> mean;
  std::vector<double> se;
};

Summary summarize(const std::function<std::vector<double>(Stream&)>& rep, std::size_t n,
                  std::uint64_t seed) {
  const Stream root(seed);
  Summary s;
  std::vector<double> sum2;
  for (std::size_t r = 0; r < n; ++r) {
    Stream stream = root.child(r);
    const auto g = rep(stream);
    if (s.mean.empty()) {
      s.mean.assign(g.size(), 0.0);
      sum2.assign(g.size(), 0.0);
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      s.mean[i] += g[i];
      sum2[i] += g[i] * g[i];
    }
  }
  s.se.resize(s.mean.size());
  for (std::size_t i = 0; i < s.mean.size(); ++i) {
    s.mean[i] /= static_cast<double>(n);
    const double var = (sum2[i] / n - s.mean[i] * s.mean[i]) * n / (n - 1.0);
    s.se[i] = std::sqrt(std::max(var, 0.0) / n);
  }
  return s;
}

std::vector<std::int64_t> integer_x0(const BuiltinModel& b) {
  return {b.default_x0.begin(), b.default_x0.end()};
}

}  // namespace

TEST_CASE("parameters without influence give zeros and spawn nothing") {
  CrnCallbacks cb;
  cb.stoichiometry = {{1}, {-1}};
  cb.param_count = 2;
  cb.propensities = [](std::span<const std::int64_t> x, const ParamVector&,
                       std::vector<double>& o) { o = {3.0, static_cast<double>(x[0])}; };
  cb.terminal_reward = [](std::span<const std::int64_t> x) { return static_cast<double>(x[0]); };
  const auto m = make_crn_model(cb);
  const std::int64_t x0[1] = {2};
  const ParamVector th{1.0, 1.0};
  EstimatorConfig cfg;
  instrumentation::reset();
  for (std::uint64_t r = 0; r < 10; ++r) {
    Stream a = Stream(1).child(r), b = a, c = a;
    CHECK(eipa_replicate(*m, th, x0, cfg, a) == std::vector<double>{0.0, 0.0});
    CHECK(girsanov_replicate_all(*m, th, x0, cfg, b) == std::vector<double>{0.0, 0.0});
    CHECK(finite_difference_crn_all(*m, th, x0, cfg, c) == std::vector<double>{0.0, 0.0});
  }
  CHECK(instrumentation::counters().auxiliary_pairs.load() == 0);
}

TEST_CASE("eIPA is exact on pure birth") {
  const auto built = builtin_model("pure-birth", {.horizon = 1.75});
  const ParamVector th(built.default_theta);
  const auto x0 = integer_x0(built);
  EstimatorConfig cfg;
  for (std::uint64_t r = 0; r < 50; ++r) {
    Stream st = Stream(3).child(r);
    CHECK(eipa_replicate(crn(built), th, x0, cfg, st)[0] == 1.75);
  }
}

TEST_CASE("birth-death gradients") {
  const auto built = builtin_model("birth-death");
  const ParamVector th(built.default_theta);
  const auto x0 = integer_x0(built);
  const std::vector<double> truth = {testing::kBdDTheta1, testing::kBdDTheta2};
  EstimatorConfig cfg;

  SECTION("eIPA") {
    const auto s = summarize(
        [&](Stream& st) { return eipa_replicate(crn(built), th, x0, cfg, st); }, 10000, 42);
    for (int i = 0; i < 2; ++i) {
      INFO("i = " << i << " mean " << s.mean[i] << " se " << s.se[i]);
      CHECK(std::abs(s.mean[i] - truth[i]) <= 3.0 * s.se[i]);
    }
  }
  SECTION("eIPA with thinning keeps its mean") {
    cfg.thinning_beta = 0.25;
    const auto s = summarize(
        [&](Stream& st) { return eipa_replicate(crn(built), th, x0, cfg, st); }, 10000, 43);
    for (int i = 0; i < 2; ++i) {
      INFO("i = " << i << " mean " << s.mean[i] << " se " << s.se[i]);
      CHECK(std::abs(s.mean[i] - truth[i]) <= 3.0 * s.se[i]);
    }
  }
  SECTION("Girsanov") {
    const auto s = summarize(
        [&](Stream& st) { return girsanov_replicate_all(crn(built), th, x0, cfg, st); }, 10000, 44);
    for (int i = 0; i < 2; ++i) {
      INFO("i = " << i << " mean " << s.mean[i] << " se " << s.se[i]);
      CHECK(std::abs(s.mean[i] - truth[i]) <= 3.0 * s.se[i]);
    }
  }
  SECTION("finite differences with Richardson extrapolation") {
    // Central differences have O(h^2) bias; combining h and h/2 removes it.
    const auto fd = [&](double h, std::uint64_t seed) {
      cfg.fd_step = h;
      return summarize(
          [&](Stream& st) { return finite_difference_crn_all(crn(built), th, x0, cfg, st); },
          20000, seed);
    };
    const auto coarse = fd(0.2, 45);
    const auto fine = fd(0.1, 46);
    for (int i = 0; i < 2; ++i) {
      const double rich = (4.0 * fine.mean[i] - coarse.mean[i]) / 3.0;
      const double se = std::hypot(4.0 * fine.se[i], coarse.se[i]) / 3.0;
      INFO("i = " << i << " extrapolated " << rich << " se " << se);
      CHECK(std::abs(rich - truth[i]) <= 3.0 * se);
      CHECK(std::abs(fine.mean[i] - truth[i]) <= 3.0 * fine.se[i] + 0.05);
    }
  }
}

TEST_CASE("single-parameter entry points match the vector forms") {
  const auto built = builtin_model("birth-death");
  const ParamVector th(built.default_theta);
  const auto x0 = integer_x0(built);
  EstimatorConfig cfg;
  Stream a(8), b(8), c(8), d(8);
  const auto all = girsanov_replicate_all(crn(built), th, x0, cfg, a);
  CHECK(girsanov_replicate(crn(built), th, x0, 1, cfg, b) == all[1]);
  const auto fd_all = finite_difference_crn_all(crn(built), th, x0, cfg, c);
  CHECK(finite_difference_crn_replicate(crn(built), th, x0, 1, cfg, d) == fd_all[1]);
  Stream e(1);
  CHECK_THROWS_AS(girsanov_replicate(crn(built), th, x0, 2, cfg, e), InvalidArgument);
  CHECK_THROWS_AS(finite_difference_crn_replicate(crn(built), th, x0, 2, cfg, e),
                  InvalidArgument);
}

TEST_CASE("Girsanov on pure birth") {
  // E[N (N / theta - T)] = T for N ~ Poisson(theta T).
  const auto built = builtin_model("pure-birth");
  const ParamVector th(built.default_theta);
  const auto x0 = integer_x0(built);
  EstimatorConfig cfg;
  const auto s = summarize(
      [&](Stream& st) { return girsanov_replicate_all(crn(built), th, x0, cfg, st); }, 20000, 5);
  CHECK(std::abs(s.mean[0] - 1.0) <= 3.0 * s.se[0]);
}

TEST_CASE("undefined score is reported") {
  // lambda = theta (x + 1) vanishes at theta = 0 while d lambda = x + 1 does not.
  CrnCallbacks cb;
  cb.stoichiometry = {{1}};
  cb.propensities = [](std::span<const std::int64_t> x, const ParamVector& th,
                       std::vector<double>& o) { o.assign(1, th[0] * (x[0] + 1.0)); };
  cb.propensity_param_derivative = [](std::span<const std::int64_t> x, const ParamVector&,
                                      std::size_t, std::vector<double>& o) {
    o.assign(1, x[0] + 1.0);
  };
  cb.terminal_reward = [](std::span<const std::int64_t> x) { return static_cast<double>(x[0]); };
  const auto m = make_crn_model(cb);
  const std::int64_t x0[1] = {0};
  EstimatorConfig cfg;
  Stream st(1);
  CHECK_THROWS_AS(girsanov_replicate_all(*m, ParamVector{0.0}, x0, cfg, st), ScoreUndefinedError);
}

TEST_CASE("sensitive reaction that cannot fire breaks the eIPA contract") {
  // Death with lambda = theta (zero guard missing on the derivative).
  CrnCallbacks cb;
  cb.stoichiometry = {{-1}};
  cb.propensities = [](std::span<const std::int64_t> x, const ParamVector& th,
                       std::vector<double>& o) { o.assign(1, x[0] > 0 ? th[0] : 0.0); };
  cb.propensity_param_derivative = [](std::span<const std::int64_t>, const ParamVector&,
                                      std::size_t, std::vector<double>& o) { o.assign(1, 1.0); };
  cb.terminal_reward = [](std::span<const std::int64_t> x) { return static_cast<double>(x[0]); };
  const auto m = make_crn_model(cb);
  const std::int64_t x0[1] = {0};
  EstimatorConfig cfg;
  Stream st(1);
  CHECK_THROWS_AS(eipa_replicate(*m, ParamVector{1.0}, x0, cfg, st), ModelContractError);
}

TEST_CASE("at most one coupled pair per reaction and replicate") {
  const auto built = builtin_model("gene-expression");
  const ParamVector th(built.default_theta);
  const auto x0 = integer_x0(built);
  EstimatorConfig cfg;
  for (std::uint64_t r = 0; r < 200; ++r) {
    instrumentation::reset();
    Stream st = Stream(6).child(r);
    eipa_replicate(crn(built), th, x0, cfg, st);
    CHECK(instrumentation::counters().auxiliary_pairs.load() <= crn(built).reaction_count());
  }
}

TEST_CASE("gene expression: eIPA agrees with the master equation") {
  const auto built = builtin_model("gene-expression");
  const ParamVector th(built.default_theta);
  const auto x0 = integer_x0(built);
  const std::int64_t caps[2] = {40, 120};
  const auto me = solve_master_equation_value_and_gradient(crn(built), th, x0, caps);
  EstimatorConfig cfg;
  const auto s = summarize(
      [&](Stream& st) { return eipa_replicate(crn(built), th, x0, cfg, st); }, 10000, 7);
  for (std::size_t i = 0; i < 4; ++i) {
    INFO("i = " << i << " eipa " << s.mean[i] << " se " << s.se[i] << " oracle "
                << me.gradient[i]);
    CHECK(std::abs(s.mean[i] - me.gradient[i]) <= 3.0 * s.se[i]);
  }
}
