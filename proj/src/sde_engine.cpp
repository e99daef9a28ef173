#include "gradest/sde_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "euler.hpp"
#include "gradest/error.hpp"
#include "gradest/instrumentation.hpp"

namespace gradest {

TimeGrid::TimeGrid(double start, double end, std::size_t step_count)
    : t0(start), t_end(end), steps(step_count) {
  if (!(start < end) || !std::isfinite(start) || !std::isfinite(end)) {
    throw InvalidArgument("time grid needs t0 < T");
  }
  if (step_count == 0) {
    throw InvalidArgument("time grid needs at least one step");
  }
}

namespace {

void check_initial_state(const SdeModel& model, std::span<const double> x0) {
  if (x0.size() != model.state_dim()) {
    throw InvalidArgument("initial state has " + std::to_string(x0.size()) +
                          " components, model has " + std::to_string(model.state_dim()));
  }
  for (const double v : x0) {
    if (!std::isfinite(v)) {
      throw InvalidArgument("initial state is not finite");
    }
  }
}

void check_grid(const SdeModel& model, const TimeGrid& grid) {
  if (!(grid.t0 < grid.t_end) || grid.steps == 0) {
    throw InvalidArgument("time grid needs t0 < T and at least one step");
  }
  if (grid.t0 < 0.0 || grid.t_end > model.horizon() * (1.0 + 1e-12)) {
    throw InvalidArgument("time grid must lie inside [0, T]");
  }
}

}  // namespace

SdePath simulate_sde_path(const SdeModel& model, const ParamVector& theta,
                          std::span<const double> x0, const TimeGrid& grid, Stream& stream) {
  check_initial_state(model, x0);
  check_grid(model, grid);
  detail::EulerStepper stepper(model, theta);
  const std::size_t d = stepper.d();
  const std::size_t w = stepper.w();
  const double dt = grid.dt();
  const double sqrt_dt = std::sqrt(dt);

  SdePath path;
  path.grid = grid;
  path.state_dim = d;
  path.noise_dim = w;
  path.states.resize((grid.steps + 1) * d);
  path.brownian_increments.resize(grid.steps * w);
  std::copy(x0.begin(), x0.end(), path.states.begin());

  for (std::size_t k = 0; k < grid.steps; ++k) {
    std::span<const double> x(path.states.data() + k * d, d);
    std::span<double> next(path.states.data() + (k + 1) * d, d);
    std::span<double> dB(path.brownian_increments.data() + k * w, w);
    stepper.eval_coefficients(grid.time(k), x);
    detail::EulerStepper::draw_increments(stream, sqrt_dt, dB);
    stepper.advance_state(x, dt, dB, next);
    detail::EulerStepper::check_finite(next, k + 1);
  }
  instrumentation::counters().sde_paths.fetch_add(1, std::memory_order_relaxed);
  return path;
}

std::pair<SdePath, VariationBundle> simulate_with_variations(const SdeModel& model,
                                                             const ParamVector& theta,
                                                             std::span<const double> x,
                                                             const TimeGrid& grid,
                                                             Stream& stream, int order) {
  if (order != 1 && order != 2) {
    throw InvalidArgument("variation order must be 1 or 2");
  }
  check_initial_state(model, x);
  check_grid(model, grid);
  detail::EulerStepper stepper(model, theta);
  const std::size_t d = stepper.d();
  const std::size_t w = stepper.w();
  const std::size_t dd = d * d;
  const std::size_t ddd = dd * d;
  const double dt = grid.dt();
  const double sqrt_dt = std::sqrt(dt);

  SdePath path;
  path.grid = grid;
  path.state_dim = d;
  path.noise_dim = w;
  path.states.resize((grid.steps + 1) * d);
  path.brownian_increments.resize(grid.steps * w);
  std::copy(x.begin(), x.end(), path.states.begin());

  VariationBundle var;
  var.state_dim = d;
  var.first.assign((grid.steps + 1) * dd, 0.0);
  for (std::size_t a = 0; a < d; ++a) {
    var.first[a * d + a] = 1.0;
  }
  if (order == 2) {
    var.second.assign((grid.steps + 1) * ddd, 0.0);
  }

  for (std::size_t k = 0; k < grid.steps; ++k) {
    const double t = grid.time(k);
    std::span<const double> xk(path.states.data() + k * d, d);
    std::span<double> next(path.states.data() + (k + 1) * d, d);
    std::span<double> dB(path.brownian_increments.data() + k * w, w);
    stepper.eval_coefficients(t, xk);
    stepper.eval_jacobians(t, xk);
    detail::EulerStepper::draw_increments(stream, sqrt_dt, dB);
    stepper.build_step_jacobian(dt, dB);
    std::span<const double> jk(var.first.data() + k * dd, dd);
    if (order == 2) {
      stepper.eval_hessians(t, xk);
      stepper.build_step_hessian(dt, dB);
      stepper.advance_second(jk, {var.second.data() + k * ddd, ddd},
                             {var.second.data() + (k + 1) * ddd, ddd});
    }
    stepper.advance_first(jk, {var.first.data() + (k + 1) * dd, dd});
    stepper.advance_state(xk, dt, dB, next);
    detail::EulerStepper::check_finite(next, k + 1);
  }
  instrumentation::counters().sde_paths.fetch_add(1, std::memory_order_relaxed);
  return {std::move(path), std::move(var)};
}

ValueDerivatives estimate_value_derivatives_at(const SdeModel& model, const ParamVector& theta,
                                               double t, std::span<const double> x,
                                               std::size_t n_aux, std::size_t steps_aux,
                                               Stream& stream) {
  if (n_aux == 0) {
    throw InvalidArgument("need at least one auxiliary replicate");
  }
  if (!(t >= 0.0 && t < model.horizon())) {
    throw InvalidArgument("evaluation time must lie in [0, T)");
  }
  check_initial_state(model, x);
  instrumentation::counters().value_derivative_calls.fetch_add(1, std::memory_order_relaxed);

  const TimeGrid grid(t, model.horizon(), steps_aux);
  detail::EulerStepper stepper(model, theta);
  const std::size_t d = stepper.d();
  const std::size_t w = stepper.w();
  const std::size_t dd = d * d;
  const std::size_t ddd = dd * d;
  const double dt = grid.dt();
  const double sqrt_dt = std::sqrt(dt);
  const bool with_rate = model.has_reward_rate();

  std::vector<double> state(d);
  std::vector<double> next(d);
  std::vector<double> jac(dd);
  std::vector<double> jac_next(dd);
  std::vector<double> second(ddd);
  std::vector<double> second_next(ddd);
  std::vector<double> dB(w);
  std::vector<double> grad_f;
  std::vector<double> hess_f;
  std::vector<double> grad_run(d);
  std::vector<double> hess_run(dd);
  std::vector<double> grad_samples;
  std::vector<double> hess_samples;
  grad_samples.reserve(n_aux * d);
  hess_samples.reserve(n_aux * dd);

  // Adds weight * [J^T grad f, J^T hess f J + sum_a grad_a f K_a] to the run.
  const auto accumulate = [&](double weight) {
    for (std::size_t i = 0; i < d; ++i) {
      double gsum = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        gsum += grad_f[a] * jac[a * d + i];
      }
      grad_run[i] += weight * gsum;
      for (std::size_t j = 0; j < d; ++j) {
        double hsum = 0.0;
        for (std::size_t a = 0; a < d; ++a) {
          const double jai = jac[a * d + i];
          for (std::size_t b = 0; b < d; ++b) {
            hsum += hess_f[a * d + b] * jai * jac[b * d + j];
          }
          hsum += grad_f[a] * second[(a * d + i) * d + j];
        }
        hess_run[i * d + j] += weight * hsum;
      }
    }
  };

  for (std::size_t r = 0; r < n_aux; ++r) {
    std::copy(x.begin(), x.end(), state.begin());
    std::fill(jac.begin(), jac.end(), 0.0);
    for (std::size_t a = 0; a < d; ++a) {
      jac[a * d + a] = 1.0;
    }
    std::fill(second.begin(), second.end(), 0.0);
    std::fill(grad_run.begin(), grad_run.end(), 0.0);
    std::fill(hess_run.begin(), hess_run.end(), 0.0);

    for (std::size_t k = 0; k < grid.steps; ++k) {
      const double tk = grid.time(k);
      if (with_rate) {
        model.reward_rate_gradient(tk, state, theta, grad_f);
        model.reward_rate_hessian(tk, state, theta, hess_f);
        accumulate(dt);
      }
      stepper.eval_coefficients(tk, state);
      stepper.eval_jacobians(tk, state);
      stepper.eval_hessians(tk, state);
      detail::EulerStepper::draw_increments(stream, sqrt_dt, dB);
      stepper.build_step_jacobian(dt, dB);
      stepper.build_step_hessian(dt, dB);
      stepper.advance_second(jac, second, second_next);
      stepper.advance_first(jac, jac_next);
      stepper.advance_state(state, dt, dB, next);
      detail::EulerStepper::check_finite(next, k + 1);
      state.swap(next);
      jac.swap(jac_next);
      second.swap(second_next);
    }
    model.terminal_reward_gradient(state, theta, grad_f);
    model.terminal_reward_hessian(state, theta, hess_f);
    if (grad_f.size() != d || hess_f.size() != dd) {
      throw ModelContractError("terminal reward derivatives have the wrong shape");
    }
    accumulate(1.0);

    grad_samples.insert(grad_samples.end(), grad_run.begin(), grad_run.end());
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        hess_samples.push_back(0.5 * (hess_run[i * d + j] + hess_run[j * d + i]));
      }
    }
  }

  const auto mean_and_stderr = [n_aux](const std::vector<double>& samples, std::size_t width,
                                       std::vector<double>& mean, std::vector<double>& se) {
    mean.assign(width, 0.0);
    se.assign(width, 0.0);
    for (std::size_t r = 0; r < n_aux; ++r) {
      for (std::size_t c = 0; c < width; ++c) {
        mean[c] += samples[r * width + c];
      }
    }
    for (double& m : mean) {
      m /= static_cast<double>(n_aux);
    }
    if (n_aux < 2) {
      return;
    }
    for (std::size_t r = 0; r < n_aux; ++r) {
      for (std::size_t c = 0; c < width; ++c) {
        const double dev = samples[r * width + c] - mean[c];
        se[c] += dev * dev;
      }
    }
    const double count = static_cast<double>(n_aux);
    for (double& s : se) {
      s = std::sqrt(s / (count - 1.0) / count);
    }
  };

  ValueDerivatives out;
  out.replicates = n_aux;
  mean_and_stderr(grad_samples, d, out.gradient, out.gradient_stderr);
  mean_and_stderr(hess_samples, dd, out.hessian, out.hessian_stderr);
  return out;
}

double path_objective(const SdeModel& model, const ParamVector& theta, const SdePath& path) {
  double total = 0.0;
  if (model.has_reward_rate()) {
    const double dt = path.grid.dt();
    for (std::size_t k = 0; k < path.grid.steps; ++k) {
      total += model.reward_rate(path.grid.time(k), path.state(k), theta) * dt;
    }
  }
  return total + model.terminal_reward(path.terminal_state(), theta);
}

}  // namespace gradest
