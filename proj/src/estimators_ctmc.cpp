#include "gradest/estimators_ctmc.hpp"

#include <cmath>
#include <string>

#include "gradest/ctmc_engine.hpp"
#include "gradest/error.hpp"

namespace gradest {
namespace {

void check_param_index(const CrnModel& model, std::size_t i) {
  if (i >= model.param_count()) {
    throw InvalidArgument("parameter index " + std::to_string(i) + " out of range (n = " +
                          std::to_string(model.param_count()) + ")");
  }
}

CrnSimulationOptions options_from(const EstimatorConfig& config) {
  CrnSimulationOptions opts;
  opts.max_jumps = config.max_jumps;
  return opts;
}

bool shift_admissible(std::span<const std::int64_t> x, const CrnState& zeta) {
  for (std::size_t s = 0; s < x.size(); ++s) {
    if (x[s] + zeta[s] < 0) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::vector<double> eipa_replicate(const CrnModel& model, const ParamVector& theta,
                                   std::span<const std::int64_t> x0,
                                   const EstimatorConfig& config, Stream& stream) {
  const std::size_t n = model.param_count();
  const std::size_t m = model.reaction_count();
  const double horizon = model.horizon();
  const double beta = config.thinning_beta;
  const auto opts = options_from(config);

  Stream main_stream = stream.child(0);
  const CrnPath path = simulate_crn_path(model, theta, x0, horizon, main_stream, opts);

  const double tau = stream.uniform() * horizon;
  const auto x_tau = path.state_at(tau);

  // dlambda[i*m + k] = d_i lambda_k(x_tau)
  std::vector<double> dlambda(n * m);
  std::vector<double> row;
  for (std::size_t i = 0; i < n; ++i) {
    model.propensity_param_derivative(x_tau, theta, i, row);
    if (row.size() != m) {
      throw ModelContractError("propensity_param_derivative returned the wrong number of values");
    }
    std::copy(row.begin(), row.end(), dlambda.begin() + static_cast<std::ptrdiff_t>(i * m));
  }

  std::vector<double> out(n, 0.0);
  const auto& zeta = model.stoichiometry();
  for (std::size_t k = 0; k < m; ++k) {
    bool sensitive = false;
    for (std::size_t i = 0; i < n; ++i) {
      sensitive = sensitive || dlambda[i * m + k] != 0.0;
    }
    if (!sensitive) {
      continue;
    }
    if (!shift_admissible(x_tau, zeta[k])) {
      throw ModelContractError("propensity derivative of reaction " + std::to_string(k) +
                               " is nonzero where the reaction cannot fire");
    }
    if (!stream.bernoulli(beta)) {
      continue;
    }
    Stream pair_stream = stream.child(1 + k);
    const CoupledPairPath pair =
        simulate_coupled_pair(model, theta, x_tau, k, tau, pair_stream, opts);
    const double diff = (model.terminal_reward(pair.shifted.terminal_state()) -
                         model.terminal_reward(pair.primary.terminal_state())) /
                        beta;
    for (std::size_t i = 0; i < n; ++i) {
      out[i] += horizon * dlambda[i * m + k] * diff;
    }
  }
  return out;
}

std::vector<double> girsanov_replicate_all(const CrnModel& model, const ParamVector& theta,
                                           std::span<const std::int64_t> x0,
                                           const EstimatorConfig& config, Stream& stream) {
  const std::size_t n = model.param_count();
  const std::size_t m = model.reaction_count();
  const CrnPath path =
      simulate_crn_path(model, theta, x0, model.horizon(), stream, options_from(config));

  std::vector<double> score(n, 0.0);
  std::vector<double> rates;
  std::vector<double> drates;
  for (std::size_t j = 0; j <= path.jump_count(); ++j) {
    const auto x = path.state(j);
    const double start = j == 0 ? 0.0 : path.jump_times[j - 1];
    const double end = j == path.jump_count() ? path.horizon : path.jump_times[j];
    const double hold = end - start;
    const bool has_jump = j < path.jump_count();
    const std::size_t fired = has_jump ? path.reaction_ids[j] : 0;
    if (has_jump) {
      model.propensities(x, theta, rates);
    }
    for (std::size_t i = 0; i < n; ++i) {
      model.propensity_param_derivative(x, theta, i, drates);
      if (drates.size() != m) {
        throw ModelContractError("propensity_param_derivative returned the wrong number of values");
      }
      double total = 0.0;
      for (const double v : drates) {
        total += v;
      }
      score[i] -= total * hold;
      if (has_jump && drates[fired] != 0.0) {
        if (!(rates[fired] > 0.0)) {
          throw ScoreUndefinedError("reaction " + std::to_string(fired) +
                                    " fired with zero propensity but nonzero sensitivity");
        }
        score[i] += drates[fired] / rates[fired];
      }
    }
  }
  // Visited states where a sensitive reaction has zero rate make the
  // likelihood ratio undefined for nearby theta.
  for (std::size_t j = 0; j <= path.jump_count(); ++j) {
    const auto x = path.state(j);
    model.propensities(x, theta, rates);
    for (std::size_t i = 0; i < n; ++i) {
      model.propensity_param_derivative(x, theta, i, drates);
      for (std::size_t k = 0; k < m; ++k) {
        if (rates[k] == 0.0 && drates[k] != 0.0) {
          throw ScoreUndefinedError("reaction " + std::to_string(k) +
                                    " has zero propensity but nonzero sensitivity at a visited state");
        }
      }
    }
  }

  const double g = model.terminal_reward(path.terminal_state());
  for (double& s : score) {
    s *= g;
  }
  return score;
}

double girsanov_replicate(const CrnModel& model, const ParamVector& theta,
                          std::span<const std::int64_t> x0, std::size_t i,
                          const EstimatorConfig& config, Stream& stream) {
  check_param_index(model, i);
  return girsanov_replicate_all(model, theta, x0, config, stream)[i];
}

double finite_difference_crn_replicate(const CrnModel& model, const ParamVector& theta,
                                       std::span<const std::int64_t> x0, std::size_t i,
                                       const EstimatorConfig& config, Stream& stream) {
  check_param_index(model, i);
  const double h = config.fd_step;
  const auto opts = options_from(config);
  const ParamVector up = theta.perturbed(i, h);
  const ParamVector down = theta.perturbed(i, -h);
  // Path streams derive per-reaction clocks from their key, so copies share them.
  Stream common = stream;
  const CrnPath path_up = simulate_crn_path(model, up, x0, model.horizon(), common, opts);
  common = stream;
  const CrnPath path_down = simulate_crn_path(model, down, x0, model.horizon(), common, opts);
  return (model.terminal_reward(path_up.terminal_state()) -
          model.terminal_reward(path_down.terminal_state())) /
         (2.0 * h);
}

std::vector<double> finite_difference_crn_all(const CrnModel& model, const ParamVector& theta,
                                              std::span<const std::int64_t> x0,
                                              const EstimatorConfig& config, Stream& stream) {
  std::vector<double> out(model.param_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = finite_difference_crn_replicate(model, theta, x0, i, config, stream);
  }
  return out;
}

}  // namespace gradest
