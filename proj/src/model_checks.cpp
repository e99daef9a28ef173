#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>

#include "gradest/error.hpp"
#include "gradest/models.hpp"
#include "linalg.hpp"

namespace gradest {

std::string_view violation_name(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::shape:
      return "shape";
    case ViolationKind::non_finite:
      return "non-finite";
    case ViolationKind::domain:
      return "domain";
    case ViolationKind::not_psd:
      return "not-psd";
    case ViolationKind::negative_propensity:
      return "negative-propensity";
    case ViolationKind::admissibility:
      return "admissibility";
    case ViolationKind::stoichiometry:
      return "stoichiometry";
  }
  return "unknown";
}

void require_valid(const ValidationReport& report) {
  if (report.passed()) {
    return;
  }
  const Violation& v = *report.first_violation;
  throw ModelContractError("model validation failed (" + std::string(violation_name(v.kind)) +
                           ") at probe " + std::to_string(v.probe_index) + ": " + v.message);
}

namespace {

struct Recorder {
  ValidationReport report;

  bool fail(ViolationKind kind, std::size_t probe, std::string message) {
    if (!report.first_violation) {
      report.first_violation = Violation{kind, probe, std::move(message)};
    }
    return false;
  }
};

bool check_output(Recorder& rec, std::size_t probe, const char* what,
                  const std::vector<double>& out, std::size_t expected) {
  if (out.size() != expected) {
    return rec.fail(ViolationKind::shape, probe,
                    std::string(what) + " returned " + std::to_string(out.size()) +
                        " values, expected " + std::to_string(expected));
  }
  if (!detail::all_finite(out)) {
    return rec.fail(ViolationKind::non_finite, probe, std::string(what) + " is not finite");
  }
  return true;
}

bool check_scalar(Recorder& rec, std::size_t probe, const char* what, double value) {
  if (!std::isfinite(value)) {
    return rec.fail(ViolationKind::non_finite, probe, std::string(what) + " is not finite");
  }
  return true;
}

bool check_sde_probe(const SdeModel& model, const SdeProbe& p, std::size_t idx, Recorder& rec) {
  const std::size_t d = model.state_dim();
  const std::size_t w = model.noise_dim();
  const std::size_t n = model.param_count();
  if (p.x.size() != d) {
    return rec.fail(ViolationKind::shape, idx, "state has " + std::to_string(p.x.size()) +
                                                   " components, expected " + std::to_string(d));
  }
  if (p.theta.size() != n) {
    return rec.fail(ViolationKind::shape, idx,
                    "theta has " + std::to_string(p.theta.size()) + " entries, expected " +
                        std::to_string(n));
  }
  if (!(p.t >= 0.0 && p.t <= model.horizon())) {
    return rec.fail(ViolationKind::domain, idx, "time outside [0, T]");
  }
  if (!detail::all_finite(p.x)) {
    return rec.fail(ViolationKind::non_finite, idx, "probe state is not finite");
  }

  std::vector<double> out;
  std::vector<double> sigma;
  model.drift(p.t, p.x, p.theta, out);
  if (!check_output(rec, idx, "drift", out, d)) return false;
  model.volatility(p.t, p.x, p.theta, sigma);
  if (!check_output(rec, idx, "volatility", sigma, d * w)) return false;
  if (!check_scalar(rec, idx, "reward_rate", model.reward_rate(p.t, p.x, p.theta))) return false;
  if (!check_scalar(rec, idx, "terminal_reward", model.terminal_reward(p.x, p.theta)))
    return false;

  for (std::size_t i = 0; i < n; ++i) {
    model.drift_param_derivative(p.t, p.x, p.theta, i, out);
    if (!check_output(rec, idx, "drift_param_derivative", out, d)) return false;
    model.volatility_param_derivative(p.t, p.x, p.theta, i, out);
    if (!check_output(rec, idx, "volatility_param_derivative", out, d * w)) return false;
    if (!check_scalar(rec, idx, "reward_rate_param_derivative",
                      model.reward_rate_param_derivative(p.t, p.x, p.theta, i)))
      return false;
    if (!check_scalar(rec, idx, "terminal_reward_param_derivative",
                      model.terminal_reward_param_derivative(p.x, p.theta, i)))
      return false;
  }

  model.drift_jacobian(p.t, p.x, p.theta, out);
  if (!check_output(rec, idx, "drift_jacobian", out, d * d)) return false;
  model.volatility_jacobian(p.t, p.x, p.theta, out);
  if (!check_output(rec, idx, "volatility_jacobian", out, d * w * d)) return false;
  model.drift_hessian(p.t, p.x, p.theta, out);
  if (!check_output(rec, idx, "drift_hessian", out, d * d * d)) return false;
  model.volatility_hessian(p.t, p.x, p.theta, out);
  if (!check_output(rec, idx, "volatility_hessian", out, d * w * d * d)) return false;
  model.reward_rate_gradient(p.t, p.x, p.theta, out);
  if (!check_output(rec, idx, "reward_rate_gradient", out, d)) return false;
  model.reward_rate_hessian(p.t, p.x, p.theta, out);
  if (!check_output(rec, idx, "reward_rate_hessian", out, d * d)) return false;
  model.terminal_reward_gradient(p.x, p.theta, out);
  if (!check_output(rec, idx, "terminal_reward_gradient", out, d)) return false;
  model.terminal_reward_hessian(p.x, p.theta, out);
  if (!check_output(rec, idx, "terminal_reward_hessian", out, d * d)) return false;

  std::vector<double> a;
  diffusion_matrix_from(sigma, d, w, a);
  double scale = 1.0;
  for (const double v : a) {
    scale = std::max(scale, std::abs(v));
  }
  const auto eig = detail::symmetric_eigenvalues(a, d);
  const double min_eig = *std::min_element(eig.begin(), eig.end());
  if (min_eig < -1e-12 * scale) {
    return rec.fail(ViolationKind::not_psd, idx,
                    "diffusion matrix eigenvalue " + std::to_string(min_eig));
  }
  return true;
}

bool check_crn_structure(const CrnModel& model, Recorder& rec) {
  const std::size_t d = model.species_count();
  const auto& zeta = model.stoichiometry();
  for (std::size_t k = 0; k < zeta.size(); ++k) {
    if (zeta[k].size() != d) {
      return rec.fail(ViolationKind::shape, 0,
                      "stoichiometric row " + std::to_string(k) + " has length " +
                          std::to_string(zeta[k].size()) + ", expected " + std::to_string(d));
    }
    if (std::all_of(zeta[k].begin(), zeta[k].end(), [](std::int64_t z) { return z == 0; })) {
      return rec.fail(ViolationKind::stoichiometry, 0,
                      "stoichiometric row " + std::to_string(k) + " is zero");
    }
  }
  return true;
}

bool check_crn_probe(const CrnModel& model, const CrnProbe& p, std::size_t idx, Recorder& rec) {
  const std::size_t d = model.species_count();
  const std::size_t m = model.reaction_count();
  if (p.x.size() != d) {
    return rec.fail(ViolationKind::shape, idx, "state has " + std::to_string(p.x.size()) +
                                                   " species, expected " + std::to_string(d));
  }
  if (p.theta.size() != model.param_count()) {
    return rec.fail(ViolationKind::shape, idx, "theta has wrong length");
  }
  if (std::any_of(p.x.begin(), p.x.end(), [](std::int64_t v) { return v < 0; })) {
    return rec.fail(ViolationKind::domain, idx, "probe state has a negative count");
  }
  std::vector<double> rates;
  model.propensities(p.x, p.theta, rates);
  if (!check_output(rec, idx, "propensities", rates, m)) return false;
  const auto& zeta = model.stoichiometry();
  for (std::size_t k = 0; k < m; ++k) {
    if (rates[k] < 0.0) {
      return rec.fail(ViolationKind::negative_propensity, idx,
                      "propensity " + std::to_string(k) + " = " + std::to_string(rates[k]));
    }
    bool leaves = false;
    for (std::size_t s = 0; s < d; ++s) {
      leaves = leaves || p.x[s] + zeta[k][s] < 0;
    }
    if (leaves && rates[k] != 0.0) {
      return rec.fail(ViolationKind::admissibility, idx,
                      "reaction " + std::to_string(k) +
                          " would produce a negative count but has positive propensity");
    }
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < model.param_count(); ++i) {
    model.propensity_param_derivative(p.x, p.theta, i, out);
    if (!check_output(rec, idx, "propensity_param_derivative", out, m)) return false;
  }
  if (!check_scalar(rec, idx, "terminal_reward", model.terminal_reward(p.x))) return false;
  return true;
}

// Accumulates max |analytic - fd| and max |analytic| per named quantity.
class FdTally {
 public:
  void add(const std::string& name, std::span<const double> analytic,
           std::span<const double> fd) {
    auto& [err, scale] = stats_[name];
    for (std::size_t k = 0; k < analytic.size() && k < fd.size(); ++k) {
      err = std::max(err, std::abs(analytic[k] - fd[k]));
      scale = std::max(scale, std::abs(analytic[k]));
    }
    if (analytic.size() != fd.size()) {
      err = std::numeric_limits<double>::infinity();
    }
  }

  std::vector<DerivativeCheck> finish(double tol) const {
    std::vector<DerivativeCheck> out;
    for (const auto& [name, stat] : stats_) {
      const auto [err, scale] = stat;
      out.push_back({name, err, err <= tol * std::max(1.0, scale)});
    }
    return out;
  }

 private:
  std::map<std::string, std::pair<double, double>> stats_;
};

using Eval = std::function<void(std::span<const double>, const ParamVector&, std::vector<double>&)>;

// Central difference of `f` in each x_b; b becomes the trailing (fastest) index.
std::vector<double> fd_in_x(const Eval& f, std::span<const double> x, const ParamVector& theta,
                            double h) {
  const std::size_t d = x.size();
  std::vector<double> xp(x.begin(), x.end());
  std::vector<double> xm(x.begin(), x.end());
  std::vector<double> fp;
  std::vector<double> fm;
  std::vector<double> out;
  for (std::size_t b = 0; b < d; ++b) {
    xp[b] = x[b] + h;
    xm[b] = x[b] - h;
    f(xp, theta, fp);
    f(xm, theta, fm);
    xp[b] = x[b];
    xm[b] = x[b];
    if (out.empty()) {
      out.assign(fp.size() * d, 0.0);
    }
    for (std::size_t r = 0; r < fp.size() && r < fm.size(); ++r) {
      out[r * d + b] = (fp[r] - fm[r]) / (2.0 * h);
    }
  }
  return out;
}

std::vector<double> fd_in_theta(const Eval& f, std::span<const double> x,
                                const ParamVector& theta, std::size_t i, double h) {
  std::vector<double> fp;
  std::vector<double> fm;
  f(x, theta.perturbed(i, h), fp);
  f(x, theta.perturbed(i, -h), fm);
  std::vector<double> out(fp.size());
  for (std::size_t r = 0; r < fp.size() && r < fm.size(); ++r) {
    out[r] = (fp[r] - fm[r]) / (2.0 * h);
  }
  return out;
}

}  // namespace

ValidationReport validate_model(const SdeModel& model, std::span<const SdeProbe> probes) {
  Recorder rec;
  for (std::size_t idx = 0; idx < probes.size(); ++idx) {
    ++rec.report.probes_checked;
    if (!check_sde_probe(model, probes[idx], idx, rec)) {
      break;
    }
  }
  return rec.report;
}

ValidationReport validate_model(const CrnModel& model, std::span<const CrnProbe> probes) {
  Recorder rec;
  if (!check_crn_structure(model, rec)) {
    return rec.report;
  }
  for (std::size_t idx = 0; idx < probes.size(); ++idx) {
    ++rec.report.probes_checked;
    if (!check_crn_probe(model, probes[idx], idx, rec)) {
      break;
    }
  }
  return rec.report;
}

std::vector<DerivativeCheck> check_derivatives(const SdeModel& model,
                                               std::span<const SdeProbe> probes, double step,
                                               double tol) {
  FdTally tally;
  std::vector<double> analytic;
  for (const SdeProbe& p : probes) {
    const double t = p.t;
    const auto scalar = [](auto fn) {
      return [fn](std::span<const double> x, const ParamVector& th, std::vector<double>& out) {
        out.assign(1, fn(x, th));
      };
    };
    const Eval drift = [&](auto x, const auto& th, auto& out) { model.drift(t, x, th, out); };
    const Eval vol = [&](auto x, const auto& th, auto& out) { model.volatility(t, x, th, out); };
    const Eval rho = scalar([&](auto x, const auto& th) { return model.reward_rate(t, x, th); });
    const Eval g = scalar([&](auto x, const auto& th) { return model.terminal_reward(x, th); });
    const Eval drift_jac = [&](auto x, const auto& th, auto& out) {
      model.drift_jacobian(t, x, th, out);
    };
    const Eval vol_jac = [&](auto x, const auto& th, auto& out) {
      model.volatility_jacobian(t, x, th, out);
    };
    const Eval rho_grad = [&](auto x, const auto& th, auto& out) {
      model.reward_rate_gradient(t, x, th, out);
    };
    const Eval g_grad = [&](auto x, const auto& th, auto& out) {
      model.terminal_reward_gradient(x, th, out);
    };

    for (std::size_t i = 0; i < model.param_count(); ++i) {
      model.drift_param_derivative(t, p.x, p.theta, i, analytic);
      tally.add("drift_param_derivative", analytic, fd_in_theta(drift, p.x, p.theta, i, step));
      model.volatility_param_derivative(t, p.x, p.theta, i, analytic);
      tally.add("volatility_param_derivative", analytic,
                fd_in_theta(vol, p.x, p.theta, i, step));
      analytic.assign(1, model.reward_rate_param_derivative(t, p.x, p.theta, i));
      tally.add("reward_rate_param_derivative", analytic,
                fd_in_theta(rho, p.x, p.theta, i, step));
      analytic.assign(1, model.terminal_reward_param_derivative(p.x, p.theta, i));
      tally.add("terminal_reward_param_derivative", analytic,
                fd_in_theta(g, p.x, p.theta, i, step));
    }

    drift_jac(p.x, p.theta, analytic);
    tally.add("drift_jacobian", analytic, fd_in_x(drift, p.x, p.theta, step));
    vol_jac(p.x, p.theta, analytic);
    tally.add("volatility_jacobian", analytic, fd_in_x(vol, p.x, p.theta, step));
    model.drift_hessian(t, p.x, p.theta, analytic);
    tally.add("drift_hessian", analytic, fd_in_x(drift_jac, p.x, p.theta, step));
    model.volatility_hessian(t, p.x, p.theta, analytic);
    tally.add("volatility_hessian", analytic, fd_in_x(vol_jac, p.x, p.theta, step));
    rho_grad(p.x, p.theta, analytic);
    tally.add("reward_rate_gradient", analytic, fd_in_x(rho, p.x, p.theta, step));
    model.reward_rate_hessian(t, p.x, p.theta, analytic);
    tally.add("reward_rate_hessian", analytic, fd_in_x(rho_grad, p.x, p.theta, step));
    g_grad(p.x, p.theta, analytic);
    tally.add("terminal_reward_gradient", analytic, fd_in_x(g, p.x, p.theta, step));
    model.terminal_reward_hessian(p.x, p.theta, analytic);
    tally.add("terminal_reward_hessian", analytic, fd_in_x(g_grad, p.x, p.theta, step));
  }
  return tally.finish(tol);
}

std::vector<DerivativeCheck> check_derivatives(const CrnModel& model,
                                               std::span<const CrnProbe> probes, double step,
                                               double tol) {
  FdTally tally;
  std::vector<double> analytic;
  std::vector<double> up;
  std::vector<double> down;
  for (const CrnProbe& p : probes) {
    for (std::size_t i = 0; i < model.param_count(); ++i) {
      model.propensity_param_derivative(p.x, p.theta, i, analytic);
      model.propensities(p.x, p.theta.perturbed(i, step), up);
      model.propensities(p.x, p.theta.perturbed(i, -step), down);
      std::vector<double> fd(up.size());
      for (std::size_t k = 0; k < up.size() && k < down.size(); ++k) {
        fd[k] = (up[k] - down[k]) / (2.0 * step);
      }
      tally.add("propensity_param_derivative", analytic, fd);
    }
  }
  return tally.finish(tol);
}

}  // namespace gradest
