#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gradest/error.hpp"
#include "gradest/oracle.hpp"
#include "gradest/rng.hpp"
#include "gradest/sde_engine.hpp"
#include "gradest/simd/kernels.hpp"

namespace gradest {

SpaceTimeGrid::SpaceTimeGrid(double lo, double hi, std::size_t space_nodes,
                             std::size_t time_nodes)
    : x_min(lo), x_max(hi), nx(space_nodes), nt(time_nodes) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw InvalidArgument("grid needs x_min < x_max");
  }
  if (space_nodes < 3 || time_nodes < 2) {
    throw InvalidArgument("grid needs nx >= 3 and nt >= 2");
  }
}

std::string_view field_kind_name(FieldKind kind) noexcept {
  return kind == FieldKind::density ? "density" : "value_function";
}

double FieldSolution::interpolate(std::size_t k, double x) const {
  const double pos = (x - grid.x_min) / grid.dx();
  if (pos <= 0.0) {
    return at(k, 0);
  }
  if (pos >= static_cast<double>(grid.nx - 1)) {
    return at(k, grid.nx - 1);
  }
  const auto j = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(j);
  if (frac == 0.0) {
    return at(k, j);
  }
  return (1.0 - frac) * at(k, j) + frac * at(k, j + 1);
}

double FieldSolution::mass(std::size_t k) const {
  const auto row = slice(k);
  double sum = 0.5 * (row.front() + row.back());
  for (std::size_t j = 1; j + 1 < row.size(); ++j) {
    sum += row[j];
  }
  return sum * grid.dx();
}

namespace {

void require_scalar(const SdeModel& model, const ParamVector& theta) {
  if (model.state_dim() != 1) {
    throw InvalidArgument("grid solvers need a one-dimensional model, " + model.name() +
                          " has d = " + std::to_string(model.state_dim()));
  }
  if (theta.size() != model.param_count()) {
    throw InvalidArgument("theta has wrong length for " + model.name());
  }
}

// Thomas algorithm; overwrites rhs with the solution.
void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                       std::vector<double>& upper, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  constexpr double tiny = 1e-300;
  if (std::abs(diag[0]) < tiny) {
    throw SingularSystemError("zero pivot in tridiagonal solve at row 0");
  }
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
    if (!(std::abs(diag[i]) >= tiny)) {
      throw SingularSystemError("zero pivot in tridiagonal solve at row " + std::to_string(i));
    }
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
  }
}

double clamp_time(double t, double horizon) { return std::min(t, horizon); }

// Drift and diffusion coefficient a = sigma^2 / 2 at every node.
void sample_coefficients(const SdeModel& model, const ParamVector& theta,
                         const SpaceTimeGrid& grid, double t, std::vector<double>& mu,
                         std::vector<double>& a) {
  std::vector<double> buf;
  double x[1];
  for (std::size_t j = 0; j < grid.nx; ++j) {
    x[0] = grid.x(j);
    model.drift(t, x, theta, buf);
    mu[j] = buf.at(0);
    model.volatility(t, x, theta, buf);
    double s2 = 0.0;
    for (const double s : buf) {
      s2 += s * s;
    }
    a[j] = 0.5 * s2;
  }
}

}  // namespace

FieldSolution solve_feynman_kac_1d(const SdeModel& model, const ParamVector& theta,
                                   const SpaceTimeGrid& grid) {
  require_scalar(model, theta);
  if (grid.nx < 4) {
    throw SingularSystemError("extrapolated boundaries need at least 4 space nodes");
  }
  const std::size_t nx = grid.nx;
  const std::size_t m = nx - 2;
  const double horizon = model.horizon();
  const double dx = grid.dx();
  const double dt = grid.dt(horizon);
  const bool with_rate = model.has_reward_rate();
  const auto& kern = simd::kernels();

  FieldSolution sol;
  sol.grid = grid;
  sol.horizon = horizon;
  sol.kind = FieldKind::value_function;
  sol.values.assign(grid.nt * nx, 0.0);

  std::vector<double> mu(nx), a(nx), rho_next(nx, 0.0), rho_now(nx, 0.0);
  std::vector<double> ex_lo(nx), ex_di(nx), ex_up(nx);
  std::vector<double> lo(m), di(m), up(m), rhs(m);
  std::vector<double> applied(nx);
  double x[1];

  const auto rates_at = [&](double t, std::vector<double>& out) {
    if (!with_rate) {
      return;
    }
    for (std::size_t j = 0; j < nx; ++j) {
      x[0] = grid.x(j);
      out[j] = model.reward_rate(t, x, theta);
    }
  };

  const std::size_t last = grid.nt - 1;
  for (std::size_t j = 0; j < nx; ++j) {
    x[0] = grid.x(j);
    sol.values[last * nx + j] = model.terminal_reward(x, theta);
  }
  double t_next = horizon;
  sample_coefficients(model, theta, grid, t_next, mu, a);
  rates_at(t_next, rho_next);

  for (std::size_t k = last; k-- > 0;) {
    const double t_now = clamp_time(static_cast<double>(k) * dt, horizon);
    // Explicit half with the coefficients at t_{k+1}.
    for (std::size_t j = 0; j < nx; ++j) {
      const double c_lo = -mu[j] / (2.0 * dx) + a[j] / (dx * dx);
      const double c_di = -2.0 * a[j] / (dx * dx);
      const double c_up = mu[j] / (2.0 * dx) + a[j] / (dx * dx);
      ex_lo[j] = 0.5 * dt * c_lo;
      ex_di[j] = 1.0 + 0.5 * dt * c_di;
      ex_up[j] = 0.5 * dt * c_up;
    }
    kern.tridiag_apply(ex_lo.data(), ex_di.data(), ex_up.data(),
                       sol.values.data() + (k + 1) * nx, applied.data(), nx);

    sample_coefficients(model, theta, grid, t_now, mu, a);
    rates_at(t_now, rho_now);
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t j = r + 1;
      const double c_lo = -mu[j] / (2.0 * dx) + a[j] / (dx * dx);
      const double c_di = -2.0 * a[j] / (dx * dx);
      const double c_up = mu[j] / (2.0 * dx) + a[j] / (dx * dx);
      lo[r] = -0.5 * dt * c_lo;
      di[r] = 1.0 - 0.5 * dt * c_di;
      up[r] = -0.5 * dt * c_up;
      rhs[r] = applied[j] + 0.5 * dt * (rho_now[j] + rho_next[j]);
    }
    // v_0 = 2 v_1 - v_2 and v_{n-1} = 2 v_{n-2} - v_{n-3}.
    di[0] += 2.0 * lo[0];
    up[0] -= lo[0];
    di[m - 1] += 2.0 * up[m - 1];
    lo[m - 1] -= up[m - 1];
    lo[0] = 0.0;
    up[m - 1] = 0.0;
    solve_tridiagonal(lo, di, up, rhs);

    double* row = sol.values.data() + k * nx;
    std::copy(rhs.begin(), rhs.end(), row + 1);
    row[0] = 2.0 * row[1] - row[2];
    row[nx - 1] = 2.0 * row[nx - 2] - row[nx - 3];
    for (const double v : std::span<const double>(row, nx)) {
      if (!std::isfinite(v)) {
        throw DivergenceError(k);
      }
    }
    rho_next.swap(rho_now);
  }
  return sol;
}

FieldSolution solve_fokker_planck_1d(const SdeModel& model, const ParamVector& theta,
                                     double x0, const SpaceTimeGrid& grid) {
  require_scalar(model, theta);
  if (!(x0 > grid.x_min && x0 < grid.x_max)) {
    throw InvalidArgument("initial point must lie inside the grid domain");
  }
  const std::size_t nx = grid.nx;
  const std::size_t m = nx - 2;
  const double horizon = model.horizon();
  const double dx = grid.dx();
  const double dt = grid.dt(horizon);
  const auto& kern = simd::kernels();

  FieldSolution sol;
  sol.grid = grid;
  sol.horizon = horizon;
  sol.kind = FieldKind::density;
  sol.values.assign(grid.nt * nx, 0.0);

  const double width = 2.0 * dx;
  for (std::size_t j = 1; j + 1 < nx; ++j) {
    const double z = (grid.x(j) - x0) / width;
    sol.values[j] = std::exp(-0.5 * z * z);
  }
  const double mass0 = sol.mass(0);
  if (!(mass0 > 0.0)) {
    throw InvalidArgument("initial point too close to the boundary");
  }
  for (std::size_t j = 0; j < nx; ++j) {
    sol.values[j] /= mass0;
  }

  std::vector<double> mu(nx), a(nx);
  std::vector<double> c_lo(nx), c_di(nx), c_up(nx);
  std::vector<double> ex_lo(nx), ex_di(nx), ex_up(nx);
  std::vector<double> lo(m), di(m), up(m), rhs(m);
  std::vector<double> applied(nx);

  // Conservative central form: (Mp)_j = (mu p)_{j-1}/2dx - (mu p)_{j+1}/2dx
  // + [(a p)_{j+1} - 2 (a p)_j + (a p)_{j-1}] / dx^2.
  const auto build = [&](double t) {
    sample_coefficients(model, theta, grid, t, mu, a);
    for (std::size_t j = 1; j + 1 < nx; ++j) {
      c_lo[j] = mu[j - 1] / (2.0 * dx) + a[j - 1] / (dx * dx);
      c_di[j] = -2.0 * a[j] / (dx * dx);
      c_up[j] = -mu[j + 1] / (2.0 * dx) + a[j + 1] / (dx * dx);
    }
  };

  build(0.0);
  for (std::size_t k = 0; k + 1 < grid.nt; ++k) {
    for (std::size_t j = 1; j + 1 < nx; ++j) {
      ex_lo[j] = 0.5 * dt * c_lo[j];
      ex_di[j] = 1.0 + 0.5 * dt * c_di[j];
      ex_up[j] = 0.5 * dt * c_up[j];
    }
    kern.tridiag_apply(ex_lo.data(), ex_di.data(), ex_up.data(), sol.values.data() + k * nx,
                       applied.data(), nx);
    build(clamp_time(static_cast<double>(k + 1) * dt, horizon));
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t j = r + 1;
      lo[r] = -0.5 * dt * c_lo[j];
      di[r] = 1.0 - 0.5 * dt * c_di[j];
      up[r] = -0.5 * dt * c_up[j];
      rhs[r] = applied[j];
    }
    lo[0] = 0.0;
    up[m - 1] = 0.0;
    solve_tridiagonal(lo, di, up, rhs);
    double* row = sol.values.data() + (k + 1) * nx;
    std::copy(rhs.begin(), rhs.end(), row + 1);
    for (std::size_t j = 0; j < nx; ++j) {
      if (!std::isfinite(row[j])) {
        throw DivergenceError(k + 1);
      }
    }
  }
  return sol;
}

AdjointReport check_adjoint_identity(const SdeModel& model, const ParamVector& theta,
                                     std::size_t i, double x0, const SpaceTimeGrid& grid,
                                     double fd_step_theta) {
  require_scalar(model, theta);
  if (i >= model.param_count()) {
    throw InvalidArgument("parameter index " + std::to_string(i) + " out of range");
  }
  if (!(fd_step_theta > 0.0)) {
    throw InvalidArgument("fd_step_theta must be positive");
  }
  const std::size_t nx = grid.nx;
  const double horizon = model.horizon();
  const double dx = grid.dx();
  const double dt = grid.dt(horizon);
  const auto& kern = simd::kernels();

  const FieldSolution v = solve_feynman_kac_1d(model, theta, grid);
  const FieldSolution p = solve_fokker_planck_1d(model, theta, x0, grid);
  const FieldSolution v_up = solve_feynman_kac_1d(model, theta.perturbed(i, fd_step_theta), grid);
  const FieldSolution v_down =
      solve_feynman_kac_1d(model, theta.perturbed(i, -fd_step_theta), grid);

  AdjointReport report;
  report.param_index = i;
  report.lhs = (v_up.interpolate(0, x0) - v_down.interpolate(0, x0)) / (2.0 * fd_step_theta);

  // p vanishes on the boundary, so the x-trapezoid reduces to dx times the
  // interior sum.
  std::vector<double> generator_term(nx, 0.0);
  std::vector<double> rate_term(nx, 0.0);
  std::vector<double> sigma, d_mu, d_sigma;
  const bool with_rate = model.has_reward_rate();
  double x[1];
  double term_generator = 0.0;
  double term_rate = 0.0;
  for (std::size_t k = 0; k < grid.nt; ++k) {
    const double t = clamp_time(static_cast<double>(k) * dt, horizon);
    for (std::size_t j = 1; j + 1 < nx; ++j) {
      x[0] = grid.x(j);
      model.volatility(t, x, theta, sigma);
      model.drift_param_derivative(t, x, theta, i, d_mu);
      model.volatility_param_derivative(t, x, theta, i, d_sigma);
      double d_a = 0.0;
      for (std::size_t w = 0; w < sigma.size(); ++w) {
        d_a += sigma[w] * d_sigma[w];
      }
      const double vx = (v.at(k, j + 1) - v.at(k, j - 1)) / (2.0 * dx);
      const double vxx = (v.at(k, j + 1) - 2.0 * v.at(k, j) + v.at(k, j - 1)) / (dx * dx);
      generator_term[j] = d_mu.at(0) * vx + d_a * vxx;
      if (with_rate) {
        rate_term[j] = model.reward_rate_param_derivative(t, x, theta, i);
      }
    }
    const double weight = (k == 0 || k + 1 == grid.nt) ? 0.5 * dt : dt;
    const auto pk = p.slice(k);
    term_generator += weight * dx * kern.dot(generator_term.data(), pk.data(), nx);
    if (with_rate) {
      term_rate += weight * dx * kern.dot(rate_term.data(), pk.data(), nx);
    }
  }

  std::vector<double> terminal_term(nx, 0.0);
  for (std::size_t j = 1; j + 1 < nx; ++j) {
    x[0] = grid.x(j);
    terminal_term[j] = model.terminal_reward_param_derivative(x, theta, i);
  }
  const double term_terminal =
      dx * kern.dot(terminal_term.data(), p.slice(grid.nt - 1).data(), nx);

  report.rhs_terms[0] = term_generator;
  report.rhs_terms[1] = term_rate;
  report.rhs_terms[2] = term_terminal;
  report.rhs = term_generator + term_rate + term_terminal;
  report.abs_gap = std::abs(report.lhs - report.rhs);
  return report;
}

SpaceTimeGrid default_pde_grid(const SdeModel& model, const ParamVector& theta, double x0,
                               std::size_t nx, std::size_t nt) {
  require_scalar(model, theta);
  constexpr std::size_t paths = 4000;
  constexpr std::size_t steps = 100;
  const TimeGrid time_grid(0.0, model.horizon(), steps);
  Stream stream(0x6f7261636c65ULL);
  std::vector<double> sum(steps + 1, 0.0);
  std::vector<double> sum_sq(steps + 1, 0.0);
  const double start[1] = {x0};
  for (std::size_t r = 0; r < paths; ++r) {
    const SdePath path = simulate_sde_path(model, theta, start, time_grid, stream);
    for (std::size_t k = 0; k <= steps; ++k) {
      const double v = path.state(k)[0];
      sum[k] += v;
      sum_sq[k] += v * v;
    }
  }
  double lo = x0;
  double hi = x0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double mean = sum[k] / paths;
    const double var = std::max(0.0, sum_sq[k] / paths - mean * mean);
    const double sd = std::sqrt(var);
    lo = std::min(lo, mean - 6.0 * sd);
    hi = std::max(hi, mean + 6.0 * sd);
  }
  if (hi - lo < 1e-8) {
    lo -= 1.0;
    hi += 1.0;
  }
  return SpaceTimeGrid(lo, hi, nx, nt);
}

}  // namespace gradest
