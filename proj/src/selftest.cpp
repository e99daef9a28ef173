#include <cmath>
#include <ostream>
#include <string>

#include "gradest/error.hpp"
#include "gradest/estimators_ctmc.hpp"
#include "gradest/estimators_sde.hpp"
#include "gradest/harness.hpp"
#include "gradest/oracle.hpp"

namespace gradest {
namespace {

// dX = dB with g(x) = x^2, so v(t, x) = x^2 + (T - t). Checked on the middle
// third of the domain, away from the extrapolated boundaries.
std::shared_ptr<const SdeModel> heat_model() {
  SdeCallbacks cb;
  cb.name = "heat";
  cb.drift = [](double, std::span<const double>, const ParamVector&, std::vector<double>& out) {
    out.assign(1, 0.0);
  };
  cb.volatility = [](double, std::span<const double>, const ParamVector&,
                     std::vector<double>& out) { out.assign(1, 1.0); };
  cb.terminal_reward = [](std::span<const double> x, const ParamVector&) { return x[0] * x[0]; };
  return make_sde_model(std::move(cb));
}

}  // namespace

bool run_selftest(std::ostream& out) {
  bool all = true;
  const auto report = [&](const std::string& name, bool ok, double measured, double bound) {
    out << (ok ? "PASS " : "FAIL ") << name << " (measured " << measured << ", bound " << bound
        << ")\n";
    all = all && ok;
  };
  const auto guarded = [&](const std::string& name, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      out << "FAIL " << name << " (" << e.what() << ")\n";
      all = false;
    }
  };

  guarded("feynman-kac heat equation", [&] {
    const auto model = heat_model();
    const ParamVector theta{0.0};
    const SpaceTimeGrid grid(-6.0, 6.0, 401, 401);
    const FieldSolution v = solve_feynman_kac_1d(*model, theta, grid);
    double err = 0.0;
    for (std::size_t k = 0; k < grid.nt; ++k) {
      for (std::size_t j = 0; j < grid.nx; ++j) {
        const double x = grid.x(j);
        if (std::abs(x) <= 2.0) {
          err = std::max(err, std::abs(v.at(k, j) - (x * x + 1.0 - v.time(k))));
        }
      }
    }
    report("feynman-kac heat equation max interior error", err <= 1e-4, err, 1e-4);
  });

  guarded("fokker-planck mass", [&] {
    const auto built = builtin_model("ou");
    const auto& model = *std::get<std::shared_ptr<const SdeModel>>(built.model);
    const ParamVector theta(built.default_theta);
    const SpaceTimeGrid grid = default_pde_grid(model, theta, 1.0);
    const FieldSolution p = solve_fokker_planck_1d(model, theta, 1.0, grid);
    double err = 0.0;
    for (std::size_t k = 0; k < grid.nt; ++k) {
      err = std::max(err, std::abs(p.mass(k) - 1.0));
    }
    report("fokker-planck mass conservation", err <= 1e-6, err, 1e-6);
  });

  guarded("adjoint identity", [&] {
    const auto built = builtin_model("drifted-bm");
    const auto& model = *std::get<std::shared_ptr<const SdeModel>>(built.model);
    const ParamVector theta(built.default_theta);
    const SpaceTimeGrid grid = default_pde_grid(model, theta, 0.0);
    const AdjointReport adj = check_adjoint_identity(model, theta, 0, 0.0, grid);
    report("adjoint identity on drifted-bm", adj.abs_gap <= 1e-3, adj.abs_gap, 1e-3);
  });

  guarded("master equation", [&] {
    const auto built = builtin_model("birth-death");
    const auto& model = *std::get<std::shared_ptr<const CrnModel>>(built.model);
    const ParamVector theta(built.default_theta);
    const std::int64_t x0[1] = {0};
    const std::int64_t caps[1] = {400};
    const auto me = solve_master_equation_value_and_gradient(model, theta, x0, caps);
    const double decay = 1.0 - std::exp(-2.0);
    const double mean = 10.0 * decay;
    const double d1 = decay;
    const double d2 = -10.0 * decay + 10.0 * 2.0 * std::exp(-2.0);
    const double err = std::max({std::abs(me.value - mean), std::abs(me.gradient[0] - d1),
                                 std::abs(me.gradient[1] - d2)});
    report("master equation birth-death closed forms", err <= 1e-6, err, 1e-6);
  });

  guarded("generator gradient exactness", [&] {
    const auto built = builtin_model("drifted-bm");
    const auto& model = *std::get<std::shared_ptr<const SdeModel>>(built.model);
    const ParamVector theta(built.default_theta);
    EstimatorConfig cfg;
    cfg.n_aux = 4;
    double worst = 0.0;
    for (std::uint64_t r = 0; r < 20; ++r) {
      Stream stream = Stream(7).child(r);
      const auto g = generator_gradient_replicate(model, theta, built.default_x0, cfg, stream);
      worst = std::max(worst, std::abs(g[0] - 1.0));
    }
    report("generator gradient equals 1 on drifted-bm", worst == 0.0, worst, 0.0);
  });

  guarded("eipa exactness", [&] {
    const auto built = builtin_model("pure-birth");
    const auto& model = *std::get<std::shared_ptr<const CrnModel>>(built.model);
    const ParamVector theta(built.default_theta);
    const std::int64_t x0[1] = {0};
    EstimatorConfig cfg;
    double worst = 0.0;
    for (std::uint64_t r = 0; r < 20; ++r) {
      Stream stream = Stream(7).child(r);
      const auto g = eipa_replicate(model, theta, x0, cfg, stream);
      worst = std::max(worst, std::abs(g[0] - model.horizon()));
    }
    report("eipa equals T on pure-birth", worst == 0.0, worst, 0.0);
  });

  return all;
}

}  // namespace gradest
