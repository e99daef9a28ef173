#include "gradest/estimators_sde.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "euler.hpp"
#include "gradest/error.hpp"
#include "gradest/sde_engine.hpp"
#include "gradest/simd/kernels.hpp"

namespace gradest {
namespace {

void check_param_index(const SdeModel& model, std::size_t i) {
  if (i >= model.param_count()) {
    throw InvalidArgument("parameter index " + std::to_string(i) + " out of range (n = " +
                          std::to_string(model.param_count()) + ")");
  }
}

// sum_k d_i rho(t_k, X_k) dt along the stored path.
double rate_sensitivity_quadrature(const SdeModel& model, const ParamVector& theta,
                                   const SdePath& path, std::size_t i) {
  double sum = 0.0;
  const double dt = path.grid.dt();
  for (std::size_t k = 0; k < path.grid.steps; ++k) {
    sum += model.reward_rate_param_derivative(path.grid.time(k), path.state(k), theta, i) * dt;
  }
  return sum;
}

}  // namespace

std::vector<double> generator_gradient_replicate(const SdeModel& model, const ParamVector& theta,
                                                 std::span<const double> x0,
                                                 const EstimatorConfig& config, Stream& stream) {
  const std::size_t n = model.param_count();
  const std::size_t d = model.state_dim();
  const std::size_t w = model.noise_dim();
  const double horizon = model.horizon();
  const TimeGrid grid(0.0, horizon, config.steps_main);

  const SdePath path = simulate_sde_path(model, theta, x0, grid, stream);

  const double tau = stream.uniform() * horizon;
  const std::size_t node =
      std::min(static_cast<std::size_t>(std::floor(tau / grid.dt())), grid.steps - 1);
  const double t_node = grid.time(node);
  const auto x_node = path.state(node);
  const std::size_t aux_steps = config.steps_aux == 0 ? grid.steps - node : config.steps_aux;

  Stream aux = stream.child(1);
  const ValueDerivatives vd =
      estimate_value_derivatives_at(model, theta, t_node, x_node, config.n_aux, aux_steps, aux);

  std::vector<double> sigma;
  std::vector<double> d_mu;
  std::vector<double> d_sigma;
  std::vector<double> d_a;
  model.volatility(t_node, x_node, theta, sigma);

  std::vector<double> out(n, 0.0);
  const bool with_rate = model.has_reward_rate();
  const auto terminal = path.terminal_state();
  for (std::size_t i = 0; i < n; ++i) {
    model.drift_param_derivative(t_node, x_node, theta, i, d_mu);
    model.volatility_param_derivative(t_node, x_node, theta, i, d_sigma);
    if (d_mu.size() != d) {
      throw ModelContractError("drift_param_derivative has the wrong shape");
    }
    diffusion_matrix_derivative_from(sigma, d_sigma, d, w, d_a);
    double generator_term = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      generator_term += vd.gradient[a] * d_mu[a];
    }
    for (std::size_t ab = 0; ab < d * d; ++ab) {
      generator_term += vd.hessian[ab] * d_a[ab];
    }
    double value = horizon * generator_term;
    if (with_rate) {
      value += rate_sensitivity_quadrature(model, theta, path, i);
    }
    value += model.terminal_reward_param_derivative(terminal, theta, i);
    out[i] = value;
  }
  return out;
}

std::vector<double> pathwise_forward_replicate(const SdeModel& model, const ParamVector& theta,
                                               std::span<const double> x0,
                                               const EstimatorConfig& config, Stream& stream) {
  const std::size_t n = model.param_count();
  const TimeGrid grid(0.0, model.horizon(), config.steps_main);
  if (x0.size() != model.state_dim()) {
    throw InvalidArgument("initial state has the wrong dimension");
  }
  detail::EulerStepper stepper(model, theta);
  const std::size_t d = stepper.d();
  const std::size_t w = stepper.w();
  const double dt = grid.dt();
  const double sqrt_dt = std::sqrt(dt);
  const bool with_rate = model.has_reward_rate();

  std::vector<double> state(x0.begin(), x0.end());
  std::vector<double> next(d);
  std::vector<double> dB(w);
  // Sensitivities Y[a*n + i] = dX_a / dtheta_i; parameters are contiguous so
  // the update runs through the vector kernels.
  std::vector<double> sens(d * n, 0.0);
  std::vector<double> sens_next(d * n);
  std::vector<double> d_mu(d * n);
  std::vector<double> d_sigma(d * w * n);
  std::vector<double> scratch;
  std::vector<double> out(n, 0.0);
  const simd::KernelTable& kern = simd::kernels();

  for (std::size_t k = 0; k < grid.steps; ++k) {
    const double t = grid.time(k);
    if (with_rate) {
      model.reward_rate_gradient(t, state, theta, scratch);
      for (std::size_t a = 0; a < d; ++a) {
        kern.axpy(scratch[a] * dt, sens.data() + a * n, out.data(), n);
      }
      for (std::size_t i = 0; i < n; ++i) {
        out[i] += model.reward_rate_param_derivative(t, state, theta, i) * dt;
      }
    }
    stepper.eval_coefficients(t, state);
    stepper.eval_jacobians(t, state);
    for (std::size_t i = 0; i < n; ++i) {
      model.drift_param_derivative(t, state, theta, i, scratch);
      if (scratch.size() != d) {
        throw ModelContractError("drift_param_derivative has the wrong shape");
      }
      for (std::size_t a = 0; a < d; ++a) {
        d_mu[a * n + i] = scratch[a];
      }
      model.volatility_param_derivative(t, state, theta, i, scratch);
      if (scratch.size() != d * w) {
        throw ModelContractError("volatility_param_derivative has the wrong shape");
      }
      for (std::size_t aj = 0; aj < d * w; ++aj) {
        d_sigma[aj * n + i] = scratch[aj];
      }
    }
    detail::EulerStepper::draw_increments(stream, sqrt_dt, dB);

    // Y' = DF Y + dt d_mu + sum_j dB_j d_sigma_j
    for (std::size_t a = 0; a < d; ++a) {
      double* row = sens_next.data() + a * n;
      std::fill(row, row + n, 0.0);
      for (std::size_t b = 0; b < d; ++b) {
        double coeff = (a == b ? 1.0 : 0.0) + stepper.jac_mu()[a * d + b] * dt;
        for (std::size_t j = 0; j < w; ++j) {
          coeff += stepper.jac_sigma()[(a * w + j) * d + b] * dB[j];
        }
        kern.axpy(coeff, sens.data() + b * n, row, n);
      }
      kern.axpy(dt, d_mu.data() + a * n, row, n);
      for (std::size_t j = 0; j < w; ++j) {
        kern.axpy(dB[j], d_sigma.data() + (a * w + j) * n, row, n);
      }
    }
    stepper.advance_state(state, dt, dB, next);
    detail::EulerStepper::check_finite(next, k + 1);
    state.swap(next);
    sens.swap(sens_next);
  }

  model.terminal_reward_gradient(state, theta, scratch);
  if (scratch.size() != d) {
    throw ModelContractError("terminal_reward_gradient has the wrong shape");
  }
  for (std::size_t a = 0; a < d; ++a) {
    kern.axpy(scratch[a], sens.data() + a * n, out.data(), n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] += model.terminal_reward_param_derivative(state, theta, i);
  }
  return out;
}

double finite_difference_sde_replicate(const SdeModel& model, const ParamVector& theta,
                                       std::span<const double> x0, std::size_t i,
                                       const EstimatorConfig& config, Stream& stream) {
  check_param_index(model, i);
  const double h = config.fd_step;
  const TimeGrid grid(0.0, model.horizon(), config.steps_main);
  const ParamVector up = theta.perturbed(i, h);
  const ParamVector down = theta.perturbed(i, -h);
  Stream common = stream;
  const SdePath path_up = simulate_sde_path(model, up, x0, grid, common);
  common = stream;
  const SdePath path_down = simulate_sde_path(model, down, x0, grid, common);
  stream = common;
  return (path_objective(model, up, path_up) - path_objective(model, down, path_down)) /
         (2.0 * h);
}

std::vector<double> finite_difference_sde_all(const SdeModel& model, const ParamVector& theta,
                                              std::span<const double> x0,
                                              const EstimatorConfig& config, Stream& stream) {
  std::vector<double> out(model.param_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    Stream copy = stream;
    out[i] = finite_difference_sde_replicate(model, theta, x0, i, config, copy);
  }
  return out;
}

}  // namespace gradest
