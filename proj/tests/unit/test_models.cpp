#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gradest/error.hpp"
#include "gradest/models.hpp"
#include "linalg.hpp"

using namespace gradest;
using Catch::Approx;

namespace {

SdeCallbacks constant_sde(std::size_t d, std::size_t w, std::vector<double> sigma) {
  SdeCallbacks cb;
  cb.state_dim = d;
  cb.noise_dim = w;
  cb.drift = [d](double, std::span<const double>, const ParamVector&, std::vector<double>& o) {
    o.assign(d, 0.0);
  };
  cb.volatility = [sigma](double, std::span<const double>, const ParamVector&,
                          std::vector<double>& o) { o = sigma; };
  return cb;
}

std::vector<SdeProbe> random_sde_probes(const BuiltinModel& built, std::size_t count,
                                        std::mt19937_64& gen) {
  const auto& model = *std::get<std::shared_ptr<const SdeModel>>(built.model);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<SdeProbe> probes;
  for (std::size_t p = 0; p < count; ++p) {
    std::vector<double> x(model.state_dim());
    for (auto& v : x) {
      v = -3.0 + 6.0 * unit(gen);
    }
    std::vector<double> th = built.default_theta;
    for (auto& v : th) {
      v *= 0.5 + unit(gen);
    }
    probes.push_back({model.horizon() * unit(gen), x, ParamVector(th)});
  }
  return probes;
}

}  // namespace

TEST_CASE("ParamVector invariants") {
  CHECK_THROWS_AS(ParamVector(std::vector<double>{}), InvalidArgument);
  CHECK_THROWS_AS(ParamVector({1.0, NAN}), InvalidArgument);
  CHECK_THROWS_AS(ParamVector({INFINITY}), InvalidArgument);
  const ParamVector th{1.0, 2.0};
  const auto up = th.perturbed(1, 0.5);
  CHECK(up[0] == 1.0);
  CHECK(up[1] == 2.5);
  CHECK(th[1] == 2.0);
}

TEST_CASE("diffusion_matrix examples") {
  const ParamVector th{0.0};
  const double x[2] = {0.0, 0.0};
  SECTION("scalar sigma = 2") {
    const auto m = make_sde_model(constant_sde(1, 1, {2.0}));
    CHECK(diffusion_matrix(*m, 0.0, std::span(x, 1), th) == std::vector<double>{2.0});
  }
  SECTION("zero sigma") {
    const auto m = make_sde_model(constant_sde(2, 2, {0, 0, 0, 0}));
    CHECK(diffusion_matrix(*m, 0.0, x, th) == std::vector<double>{0, 0, 0, 0});
  }
  SECTION("lower-triangular sigma") {
    const auto m = make_sde_model(constant_sde(2, 2, {1, 0, 1, 1}));
    CHECK(diffusion_matrix(*m, 0.0, x, th) == std::vector<double>{0.5, 0.5, 0.5, 1.0});
  }
  SECTION("shape mismatch is a contract error") {
    auto cb = constant_sde(1, 1, {1.0, 2.0});
    const auto m = make_sde_model(cb);
    CHECK_THROWS_AS(diffusion_matrix(*m, 0.0, std::span(x, 1), th), ModelContractError);
  }
}

TEST_CASE("diffusion_matrix_param_derivative examples") {
  const double x[1] = {0.3};
  SECTION("sigma = theta") {
    SdeCallbacks cb;
    cb.drift = [](double, std::span<const double>, const ParamVector&, std::vector<double>& o) {
      o.assign(1, 0.0);
    };
    cb.volatility = [](double, std::span<const double>, const ParamVector& th,
                       std::vector<double>& o) { o.assign(1, th[0]); };
    cb.volatility_param_derivative = [](double, std::span<const double>, const ParamVector&,
                                        std::size_t, std::vector<double>& o) { o.assign(1, 1.0); };
    const auto m = make_sde_model(cb);
    CHECK(diffusion_matrix_param_derivative(*m, 0.0, x, ParamVector{1.7}, 0)[0] == 1.7);
    CHECK_THROWS_AS(diffusion_matrix_param_derivative(*m, 0.0, x, ParamVector{1.7}, 1),
                    InvalidArgument);
  }
  SECTION("theta-free sigma") {
    const auto m = make_sde_model(constant_sde(1, 1, {3.0}));
    CHECK(diffusion_matrix_param_derivative(*m, 0.0, x, ParamVector{1.0}, 0)[0] == 0.0);
  }
  SECTION("d = 1, w = 2, sigma = (th1, th2)") {
    SdeCallbacks cb;
    cb.noise_dim = 2;
    cb.param_count = 2;
    cb.drift = [](double, std::span<const double>, const ParamVector&, std::vector<double>& o) {
      o.assign(1, 0.0);
    };
    cb.volatility = [](double, std::span<const double>, const ParamVector& th,
                       std::vector<double>& o) { o = {th[0], th[1]}; };
    cb.volatility_param_derivative = [](double, std::span<const double>, const ParamVector&,
                                        std::size_t i, std::vector<double>& o) {
      o = {i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0};
    };
    const auto m = make_sde_model(cb);
    CHECK(diffusion_matrix_param_derivative(*m, 0.0, x, ParamVector{0.8, 0.3}, 0)[0] == 0.8);
  }
}

TEST_CASE("validate_model examples") {
  SECTION("stoichiometry row of the wrong length") {
    CrnCallbacks cb;
    cb.species_count = 2;
    cb.stoichiometry = {{1}};
    cb.propensities = [](std::span<const std::int64_t>, const ParamVector& th,
                         std::vector<double>& o) { o.assign(1, th[0]); };
    const auto m = make_crn_model(cb);
    const CrnProbe probes[] = {{{0, 0}, ParamVector{1.0}}};
    const auto rep = validate_model(*m, probes);
    REQUIRE_FALSE(rep.passed());
    CHECK(rep.first_violation->kind == ViolationKind::shape);
  }
  SECTION("birth-death at x = 0 is admissible") {
    const auto built = builtin_model("birth-death");
    const auto& m = *std::get<std::shared_ptr<const CrnModel>>(built.model);
    const CrnProbe probes[] = {{{0}, ParamVector{10.0, 1.0}}};
    CHECK(validate_model(m, probes).passed());
  }
  SECTION("sigma with an extra column") {
    const auto m = make_sde_model(constant_sde(1, 1, {1.0, 1.0}));
    const SdeProbe probes[] = {{0.0, {0.0}, ParamVector{1.0}}};
    const auto rep = validate_model(*m, probes);
    REQUIRE_FALSE(rep.passed());
    CHECK(rep.first_violation->kind == ViolationKind::shape);
  }
  SECTION("inadmissible propensity") {
    CrnCallbacks cb;
    cb.stoichiometry = {{-1}};
    cb.propensities = [](std::span<const std::int64_t>, const ParamVector&,
                         std::vector<double>& o) { o.assign(1, 1.0); };
    const auto m = make_crn_model(cb);
    const CrnProbe probes[] = {{{0}, ParamVector{1.0}}};
    const auto rep = validate_model(*m, probes);
    REQUIRE_FALSE(rep.passed());
    CHECK(rep.first_violation->kind == ViolationKind::admissibility);
    CHECK_THROWS_AS(require_valid(rep), ModelContractError);
  }
  SECTION("negative propensity") {
    CrnCallbacks cb;
    cb.stoichiometry = {{1}};
    cb.propensities = [](std::span<const std::int64_t>, const ParamVector&,
                         std::vector<double>& o) { o.assign(1, -1.0); };
    const auto m = make_crn_model(cb);
    const CrnProbe probes[] = {{{0}, ParamVector{1.0}}};
    CHECK(validate_model(*m, probes).first_violation->kind ==
          ViolationKind::negative_propensity);
  }
  SECTION("zero stoichiometry row") {
    CrnCallbacks cb;
    cb.stoichiometry = {{0}};
    cb.propensities = [](std::span<const std::int64_t>, const ParamVector&,
                         std::vector<double>& o) { o.assign(1, 1.0); };
    const auto m = make_crn_model(cb);
    const CrnProbe probes[] = {{{0}, ParamVector{1.0}}};
    CHECK(validate_model(*m, probes).first_violation->kind == ViolationKind::stoichiometry);
  }
  SECTION("time outside the horizon") {
    const auto m = make_sde_model(constant_sde(1, 1, {1.0}));
    const SdeProbe probes[] = {{2.0, {0.0}, ParamVector{1.0}}};
    CHECK(validate_model(*m, probes).first_violation->kind == ViolationKind::domain);
  }
}

TEST_CASE("builtin catalog") {
  const auto ou = builtin_model("ou");
  REQUIRE(is_sde(ou.model));
  const auto& ou_m = *std::get<std::shared_ptr<const SdeModel>>(ou.model);
  CHECK(ou_m.state_dim() == 1);
  CHECK(ou_m.param_count() == 2);
  std::vector<double> out;
  const double x[1] = {2.0};
  ou_m.drift(0.0, x, ParamVector{1.5, 0.5}, out);
  CHECK(out[0] == -3.0);
  ou_m.volatility(0.0, x, ParamVector{1.5, 0.5}, out);
  CHECK(out[0] == 0.5);

  const auto bd = builtin_model("birth-death");
  REQUIRE_FALSE(is_sde(bd.model));
  const auto& bd_m = *std::get<std::shared_ptr<const CrnModel>>(bd.model);
  CHECK(bd_m.species_count() == 1);
  CHECK(bd_m.reaction_count() == 2);
  CHECK(bd_m.stoichiometry() == std::vector<CrnState>{{1}, {-1}});
  const std::int64_t s[1] = {7};
  bd_m.propensities(s, ParamVector{10.0, 2.0}, out);
  CHECK(out == std::vector<double>{10.0, 14.0});

  BuiltinOptions opts;
  opts.n_features = 64;
  const auto fd = builtin_model("feature-drift", opts);
  CHECK(std::get<std::shared_ptr<const SdeModel>>(fd.model)->param_count() == 64);

  CHECK_THROWS_AS(builtin_model("no-such-model"), UnknownModelError);
  try {
    builtin_model("no-such-model");
  } catch (const Error& e) {
    CHECK(e.exit_code() == static_cast<int>(ErrorCategory::unknown_model));
  }
  CHECK(builtin_model_ids().size() == 7);
}

TEST_CASE("every builtin model passes validation and derivative checks") {
  std::mt19937_64 gen(314);
  for (const auto& id : builtin_model_ids()) {
    BuiltinOptions opts;
    if (id == "feature-drift") {
      opts.n_features = 64;
    }
    const auto built = builtin_model(id, opts);
    INFO(id);
    if (is_sde(built.model)) {
      const auto& m = *std::get<std::shared_ptr<const SdeModel>>(built.model);
      const auto probes = random_sde_probes(built, 100, gen);
      const auto rep = validate_model(m, probes);
      CHECK(rep.passed());
      CHECK(rep.probes_checked == 100);
      for (const auto& c : check_derivatives(m, probes)) {
        INFO(c.quantity << " max error " << c.max_error);
        CHECK(c.passed);
      }
      for (const auto& p : probes) {
        const auto a = diffusion_matrix(m, p.t, p.x, p.theta);
        const std::size_t d = m.state_dim();
        for (std::size_t r = 0; r < d; ++r) {
          for (std::size_t c = 0; c < d; ++c) {
            CHECK(a[r * d + c] == a[c * d + r]);
          }
        }
        for (const double ev : detail::symmetric_eigenvalues(a, d)) {
          CHECK(ev >= -1e-12);
        }
      }
    } else {
      const auto& m = *std::get<std::shared_ptr<const CrnModel>>(built.model);
      std::uniform_int_distribution<std::int64_t> count(0, 30);
      std::vector<CrnProbe> probes;
      for (int p = 0; p < 100; ++p) {
        CrnState x(m.species_count());
        for (auto& v : x) {
          v = p < 5 ? 0 : count(gen);
        }
        probes.push_back({x, ParamVector(built.default_theta)});
      }
      CHECK(validate_model(m, probes).passed());
      for (const auto& c : check_derivatives(m, probes)) {
        INFO(c.quantity << " max error " << c.max_error);
        CHECK(c.passed);
      }
    }
  }
}

TEST_CASE("derivative check catches a wrong derivative") {
  SdeCallbacks cb;
  cb.drift = [](double, std::span<const double> x, const ParamVector& th,
                std::vector<double>& o) { o.assign(1, th[0] * x[0]); };
  cb.volatility = [](double, std::span<const double>, const ParamVector&,
                     std::vector<double>& o) { o.assign(1, 1.0); };
  cb.drift_param_derivative = [](double, std::span<const double> x, const ParamVector&,
                                 std::size_t, std::vector<double>& o) {
    o.assign(1, 2.0 * x[0]);
  };
  cb.drift_jacobian = [](double, std::span<const double>, const ParamVector& th,
                         std::vector<double>& o) { o.assign(1, th[0]); };
  const auto m = make_sde_model(cb);
  const SdeProbe probes[] = {{0.5, {1.0}, ParamVector{0.7}}};
  bool caught = false;
  for (const auto& c : check_derivatives(*m, probes)) {
    if (c.quantity == "drift_param_derivative") {
      caught = !c.passed;
    } else {
      CHECK(c.passed);
    }
  }
  CHECK(caught);
}
