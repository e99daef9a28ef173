#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "gradest/models.hpp"
#include "gradest/rng.hpp"

namespace gradest {

/// Uniform grid t0 < t0 + dt < ... < T.
struct TimeGrid {
  double t0 = 0.0;
  double t_end = 1.0;
  std::size_t steps = 1;

  TimeGrid() = default;
  TimeGrid(double start, double end, std::size_t step_count);

  double dt() const noexcept { return (t_end - t0) / static_cast<double>(steps); }
  double time(std::size_t k) const noexcept { return t0 + dt() * static_cast<double>(k); }
};

/// Euler-Maruyama path with the Brownian increments that drove it.
struct SdePath {
  TimeGrid grid;
  std::size_t state_dim = 0;
  std::size_t noise_dim = 0;
  std::vector<double> states;                // (steps + 1) x d
  std::vector<double> brownian_increments;   // steps x w

  std::span<const double> state(std::size_t k) const {
    return {states.data() + k * state_dim, state_dim};
  }
  std::span<const double> increment(std::size_t k) const {
    return {brownian_increments.data() + k * noise_dim, noise_dim};
  }
  std::span<const double> terminal_state() const { return state(grid.steps); }
};

/// First variation J_k = dX_k/dx (d x d, row-major, J[a*d + i]) and,
/// for order 2, the second variation K_k[(a*d + i)*d + j] = d2 X_{k,a}/dx_i dx_j.
struct VariationBundle {
  std::size_t state_dim = 0;
  std::vector<double> first;   // (steps + 1) x d x d
  std::vector<double> second;  // (steps + 1) x d x d x d; empty for order 1

  std::span<const double> jacobian(std::size_t k) const {
    return {first.data() + k * state_dim * state_dim, state_dim * state_dim};
  }
  std::span<const double> second_variation(std::size_t k) const {
    const std::size_t block = state_dim * state_dim * state_dim;
    return {second.data() + k * block, block};
  }
  bool has_second() const noexcept { return !second.empty(); }
};

SdePath simulate_sde_path(const SdeModel& model, const ParamVector& theta,
                          std::span<const double> x0, const TimeGrid& grid, Stream& stream);

/// Euler path from (t_start, x) together with the exact first (and second)
/// derivatives of the discrete Euler flow with respect to x.
std::pair<SdePath, VariationBundle> simulate_with_variations(const SdeModel& model,
                                                             const ParamVector& theta,
                                                             std::span<const double> x,
                                                             const TimeGrid& grid,
                                                             Stream& stream, int order);

struct ValueDerivatives {
  std::vector<double> gradient;         // d
  std::vector<double> hessian;          // d x d, symmetrized
  std::vector<double> gradient_stderr;  // d
  std::vector<double> hessian_stderr;   // d x d, of the symmetrized entries
  std::size_t replicates = 0;
};

/// Pathwise estimates of grad v(t, x) and hess v(t, x) from `n_aux`
/// independent Euler runs over [t, T] with `steps_aux` steps.
ValueDerivatives estimate_value_derivatives_at(const SdeModel& model, const ParamVector& theta,
                                               double t, std::span<const double> x,
                                               std::size_t n_aux, std::size_t steps_aux,
                                               Stream& stream);

/// Objective along a path: sum_k rho(t_k, X_k) dt + g(X_N).
double path_objective(const SdeModel& model, const ParamVector& theta, const SdePath& path);

}  // namespace gradest
