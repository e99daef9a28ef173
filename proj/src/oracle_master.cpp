#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gradest/error.hpp"
#include "gradest/oracle.hpp"
#include "gradest/simd/kernels.hpp"

namespace gradest {
namespace {

// Row-compressed sparse matrix whose rows are generator rows: (Q f)(x) =
// sum_k rate_k(x) [f(x + zeta_k) - f(x)].
struct SparseGenerator {
  std::vector<std::size_t> row_start;
  std::vector<std::size_t> target;
  std::vector<double> rate;

  // out = Q f
  void apply(const std::vector<double>& f, std::vector<double>& out) const {
    const std::size_t n = row_start.size() - 1;
    for (std::size_t s = 0; s < n; ++s) {
      double acc = 0.0;
      for (std::size_t e = row_start[s]; e < row_start[s + 1]; ++e) {
        acc += rate[e] * (f[target[e]] - f[s]);
      }
      out[s] = acc;
    }
  }

  // out = Q^T p
  void apply_transpose(const std::vector<double>& p, std::vector<double>& out) const {
    const std::size_t n = row_start.size() - 1;
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t e = row_start[s]; e < row_start[s + 1]; ++e) {
        const double flow = rate[e] * p[s];
        out[target[e]] += flow;
        out[s] -= flow;
      }
    }
  }

  double max_exit_rate() const {
    const std::size_t n = row_start.size() - 1;
    double best = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      double exit = 0.0;
      for (std::size_t e = row_start[s]; e < row_start[s + 1]; ++e) {
        exit += rate[e];
      }
      best = std::max(best, exit);
    }
    return best;
  }
};

}  // namespace

MasterEquationResult solve_master_equation_value_and_gradient(
    const CrnModel& model, const ParamVector& theta, std::span<const std::int64_t> x0,
    std::span<const std::int64_t> caps, const MasterEquationOptions& options) {
  const std::size_t d = model.species_count();
  const std::size_t m = model.reaction_count();
  const std::size_t n = model.param_count();
  if (theta.size() != n) {
    throw InvalidArgument("theta has wrong length for " + model.name());
  }
  if (x0.size() != d || caps.size() != d) {
    throw InvalidArgument("x0 and caps need one entry per species");
  }
  std::size_t states = 1;
  for (std::size_t s = 0; s < d; ++s) {
    if (caps[s] < 0) {
      throw InvalidArgument("caps must be nonnegative");
    }
    if (x0[s] < 0 || x0[s] > caps[s]) {
      throw InvalidArgument("x0 lies outside the truncated state space");
    }
    states *= static_cast<std::size_t>(caps[s]) + 1;
    if (states > options.max_states) {
      throw InvalidArgument("truncated state space exceeds " +
                            std::to_string(options.max_states) + " states");
    }
  }

  // Mixed-radix indexing, species 0 fastest.
  std::vector<std::size_t> stride(d);
  std::size_t acc = 1;
  for (std::size_t s = 0; s < d; ++s) {
    stride[s] = acc;
    acc *= static_cast<std::size_t>(caps[s]) + 1;
  }

  const auto& zeta = model.stoichiometry();
  SparseGenerator q;
  std::vector<SparseGenerator> dq(n);
  q.row_start.reserve(states + 1);
  q.row_start.push_back(0);
  for (auto& g : dq) {
    g.row_start.push_back(0);
  }
  // Only upper caps of species that some reaction can increase truncate
  // anything.
  std::vector<char> grows(d, 0);
  for (std::size_t s = 0; s < d; ++s) {
    for (std::size_t k = 0; k < m; ++k) {
      grows[s] = grows[s] || zeta[k][s] > 0;
    }
  }
  std::vector<double> terminal(states);
  std::vector<char> on_boundary(states, 0);
  std::vector<std::int64_t> x(d);
  std::vector<double> props;
  std::vector<std::vector<double>> dprops(n);

  for (std::size_t idx = 0; idx < states; ++idx) {
    std::size_t rem = idx;
    for (std::size_t s = 0; s < d; ++s) {
      const std::size_t radix = static_cast<std::size_t>(caps[s]) + 1;
      x[s] = static_cast<std::int64_t>(rem % radix);
      rem /= radix;
      if (grows[s] && x[s] == caps[s]) {
        on_boundary[idx] = 1;
      }
    }
    terminal[idx] = model.terminal_reward(x);
    model.propensities(x, theta, props);
    if (props.size() != m) {
      throw ModelContractError("propensities returned the wrong number of values");
    }
    for (std::size_t i = 0; i < n; ++i) {
      model.propensity_param_derivative(x, theta, i, dprops[i]);
      if (dprops[i].size() != m) {
        throw ModelContractError("propensity_param_derivative returned the wrong number of values");
      }
    }
    for (std::size_t k = 0; k < m; ++k) {
      std::size_t to = idx;
      bool inside = true;
      for (std::size_t s = 0; s < d && inside; ++s) {
        const std::int64_t y = x[s] + zeta[k][s];
        if (y < 0 || y > caps[s]) {
          inside = false;
        } else {
          to = to + static_cast<std::size_t>(y) * stride[s] -
               static_cast<std::size_t>(x[s]) * stride[s];
        }
      }
      if (!inside) {
        continue;
      }
      if (props[k] != 0.0) {
        q.target.push_back(to);
        q.rate.push_back(props[k]);
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (dprops[i][k] != 0.0) {
          dq[i].target.push_back(to);
          dq[i].rate.push_back(dprops[i][k]);
        }
      }
    }
    q.row_start.push_back(q.target.size());
    for (auto& g : dq) {
      g.row_start.push_back(g.target.size());
    }
  }

  std::size_t start = 0;
  for (std::size_t s = 0; s < d; ++s) {
    start += static_cast<std::size_t>(x0[s]) * stride[s];
  }

  const double horizon = model.horizon();
  std::size_t steps = options.steps;
  if (steps == 0) {
    steps = std::max<std::size_t>(
        100, static_cast<std::size_t>(std::ceil(4.0 * horizon * q.max_exit_rate())));
  }
  const double h = horizon / static_cast<double>(steps);

  // Unknowns: v (time-to-go value), s_i = d v / d theta_i, and the forward
  // law p used to monitor the truncation boundary.
  const std::size_t blocks = n + 2;
  std::vector<double> y(blocks * states, 0.0);
  std::copy(terminal.begin(), terminal.end(), y.begin());
  y[(n + 1) * states + start] = 1.0;

  std::vector<double> tmp_in(states), tmp_out(states), tmp_src(states);
  const auto rhs = [&](const std::vector<double>& in, std::vector<double>& out) {
    tmp_in.assign(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(states));
    q.apply(tmp_in, tmp_out);
    std::copy(tmp_out.begin(), tmp_out.end(), out.begin());
    for (std::size_t i = 0; i < n; ++i) {
      dq[i].apply(tmp_in, tmp_src);
      const auto off = static_cast<std::ptrdiff_t>((i + 1) * states);
      std::vector<double> si(in.begin() + off, in.begin() + off + static_cast<std::ptrdiff_t>(states));
      q.apply(si, tmp_out);
      for (std::size_t s = 0; s < states; ++s) {
        out[(i + 1) * states + s] = tmp_out[s] + tmp_src[s];
      }
    }
    const auto poff = static_cast<std::ptrdiff_t>((n + 1) * states);
    std::vector<double> p(in.begin() + poff, in.begin() + poff + static_cast<std::ptrdiff_t>(states));
    q.apply_transpose(p, tmp_out);
    std::copy(tmp_out.begin(), tmp_out.end(), out.begin() + poff);
  };

  const auto& kern = simd::kernels();
  const std::size_t total = y.size();
  std::vector<double> k1(total), k2(total), k3(total), k4(total), stage(total);
  const auto boundary_mass = [&]() {
    double mass = 0.0;
    for (std::size_t s = 0; s < states; ++s) {
      if (on_boundary[s]) {
        mass += std::abs(y[(n + 1) * states + s]);
      }
    }
    return mass;
  };

  MasterEquationResult result;
  result.state_count = states;
  result.steps = steps;
  result.boundary_mass = boundary_mass();
  for (std::size_t step = 0; step < steps; ++step) {
    rhs(y, k1);
    stage = y;
    kern.axpy(0.5 * h, k1.data(), stage.data(), total);
    rhs(stage, k2);
    stage = y;
    kern.axpy(0.5 * h, k2.data(), stage.data(), total);
    rhs(stage, k3);
    stage = y;
    kern.axpy(h, k3.data(), stage.data(), total);
    rhs(stage, k4);
    kern.axpy(h / 6.0, k1.data(), y.data(), total);
    kern.axpy(h / 3.0, k2.data(), y.data(), total);
    kern.axpy(h / 3.0, k3.data(), y.data(), total);
    kern.axpy(h / 6.0, k4.data(), y.data(), total);
    result.boundary_mass = std::max(result.boundary_mass, boundary_mass());
  }

  if (result.boundary_mass > options.boundary_tolerance) {
    throw TruncationError(result.boundary_mass, options.boundary_tolerance);
  }

  result.value = y[start];
  result.gradient.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.gradient[i] = y[(i + 1) * states + start];
  }
  return result;
}

}  // namespace gradest
