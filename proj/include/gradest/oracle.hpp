#pragma once

// Deterministic reference solutions: 1-D grid solvers for the backward
// (Feynman-Kac) and forward (Fokker-Planck) equations of a scalar SDE, a
// numerical check that the parameter derivative of the value equals its
// adjoint representation, and a truncated master-equation solver for small
// reaction networks.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gradest/models.hpp"

namespace gradest {

struct SpaceTimeGrid {
  double x_min = -6.0;
  double x_max = 6.0;
  std::size_t nx = 401;  // space nodes, including both boundaries
  std::size_t nt = 401;  // time nodes on [0, T], including both ends

  SpaceTimeGrid() = default;
  /// Throws InvalidArgument unless x_min < x_max, nx >= 3 and nt >= 2.
  SpaceTimeGrid(double lo, double hi, std::size_t space_nodes, std::size_t time_nodes);

  double dx() const noexcept { return (x_max - x_min) / static_cast<double>(nx - 1); }
  double dt(double horizon) const noexcept { return horizon / static_cast<double>(nt - 1); }
  double x(std::size_t j) const noexcept { return x_min + static_cast<double>(j) * dx(); }
};

enum class FieldKind { value_function, density };

std::string_view field_kind_name(FieldKind kind) noexcept;

struct FieldSolution {
  SpaceTimeGrid grid;
  double horizon = 0.0;
  FieldKind kind = FieldKind::value_function;
  std::vector<double> values;  // nt x nx, row k is time t_k = k * dt

  double at(std::size_t k, std::size_t j) const { return values[k * grid.nx + j]; }
  std::span<const double> slice(std::size_t k) const {
    return {values.data() + k * grid.nx, grid.nx};
  }
  double time(std::size_t k) const noexcept { return static_cast<double>(k) * grid.dt(horizon); }
  /// Linear interpolation in x on time slice k; clamps outside the domain.
  double interpolate(std::size_t k, double x) const;
  /// Trapezoid integral of time slice k.
  double mass(std::size_t k) const;
};

/// Backward Crank-Nicolson solve of dv/dt + mu dv/dx + a d2v/dx2 + rho = 0,
/// v(T, .) = g, with zero-second-derivative boundaries. Needs d = 1 and
/// nx >= 4. Throws SingularSystemError if a tridiagonal pivot vanishes.
FieldSolution solve_feynman_kac_1d(const SdeModel& model, const ParamVector& theta,
                                   const SpaceTimeGrid& grid);

/// Forward Crank-Nicolson solve of dp/dt = -d(mu p)/dx + d2(a p)/dx2 from a
/// Gaussian of width 2 dx at x0, zero at both boundaries.
FieldSolution solve_fokker_planck_1d(const SdeModel& model, const ParamVector& theta,
                                     double x0, const SpaceTimeGrid& grid);

struct AdjointReport {
  std::size_t param_index = 0;
  double lhs = 0.0;
  // [0] int <(d_i mu) dv/dx + (d_i a) d2v/dx2, p> dt
  // [1] int <d_i rho, p> dt
  // [2] <d_i g, p(T, .)>
  double rhs_terms[3] = {0.0, 0.0, 0.0};
  double rhs = 0.0;
  double abs_gap = 0.0;
};

/// Compares a central difference in theta_i of v(0, x0) (two Feynman-Kac
/// solves) against the sum of the three adjoint inner products.
AdjointReport check_adjoint_identity(const SdeModel& model, const ParamVector& theta,
                                     std::size_t i, double x0, const SpaceTimeGrid& grid,
                                     double fd_step_theta = 1e-4);

/// Domain covering mean +/- 6 standard deviations of X(t) over [0, T],
/// estimated from a fixed-seed Monte Carlo run, with nx by nt nodes.
SpaceTimeGrid default_pde_grid(const SdeModel& model, const ParamVector& theta, double x0,
                               std::size_t nx = 401, std::size_t nt = 401);

struct MasterEquationResult {
  double value = 0.0;
  std::vector<double> gradient;
  std::size_t state_count = 0;
  std::size_t steps = 0;
  /// Largest probability found on the truncation boundary over [0, T].
  double boundary_mass = 0.0;
};

struct MasterEquationOptions {
  double boundary_tolerance = 1e-6;
  std::size_t max_states = 200'000;
  /// 0 picks max(100, ceil(4 T max_exit_rate)).
  std::size_t steps = 0;
};

/// v(0, x0) and its theta-gradient on the box 0 <= x_s <= caps[s].
/// Transitions leaving the box are dropped. Throws TruncationError when the
/// boundary carries more than options.boundary_tolerance of probability.
MasterEquationResult solve_master_equation_value_and_gradient(
    const CrnModel& model, const ParamVector& theta, std::span<const std::int64_t> x0,
    std::span<const std::int64_t> caps, const MasterEquationOptions& options = {});

}  // namespace gradest
