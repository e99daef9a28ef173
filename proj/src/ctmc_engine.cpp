#include "gradest/ctmc_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gradest/error.hpp"
#include "gradest/instrumentation.hpp"

namespace gradest {

std::span<const std::int64_t> CrnPath::state_at(double t) const {
  const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  return state(static_cast<std::size_t>(it - jump_times.begin()));
}

namespace {

// Modified next reaction method over `channels` unit-rate clocks.
// `rates(out)` refreshes the channel rates for the current state and
// `fire(c, t)` applies channel c at time t.
template <typename RatesFn, typename FireFn>
void next_reaction_loop(std::size_t channels, double horizon, Stream& stream,
                        std::size_t max_jumps, RatesFn&& rates, FireFn&& fire) {
  std::vector<Stream> clocks;
  clocks.reserve(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    clocks.push_back(stream.child(c));
  }
  std::vector<double> internal(channels, 0.0);
  std::vector<double> next_fire(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    next_fire[c] = clocks[c].exponential();
  }
  std::vector<double> lambda(channels);
  rates(lambda);

  double t = 0.0;
  std::size_t jumps = 0;
  for (;;) {
    std::size_t winner = channels;
    double wait = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < channels; ++c) {
      const double rate = lambda[c];
      if (!(rate >= 0.0) || !std::isfinite(rate)) {
        throw ModelContractError("propensity " + std::to_string(c) + " is negative or not finite (" +
                                 std::to_string(rate) + ")");
      }
      if (rate > 0.0) {
        const double candidate = (next_fire[c] - internal[c]) / rate;
        if (candidate < wait) {
          wait = candidate;
          winner = c;
        }
      }
    }
    if (winner == channels || t + wait > horizon) {
      break;
    }
    t += wait;
    for (std::size_t c = 0; c < channels; ++c) {
      internal[c] += lambda[c] * wait;
    }
    internal[winner] = next_fire[winner];
    next_fire[winner] += clocks[winner].exponential();
    if (++jumps > max_jumps) {
      throw ExplosionError(max_jumps);
    }
    fire(winner, t);
    rates(lambda);
  }
}

void check_state(const CrnModel& model, std::span<const std::int64_t> x, const ParamVector& theta) {
  if (x.size() != model.species_count()) {
    throw InvalidArgument("state has " + std::to_string(x.size()) + " species, model has " +
                          std::to_string(model.species_count()));
  }
  if (theta.size() != model.param_count()) {
    throw InvalidArgument("theta has wrong length for " + model.name());
  }
  for (const auto v : x) {
    if (v < 0) {
      throw InvalidArgument("initial state has a negative count");
    }
  }
}

CrnPath start_path(const CrnModel& model, std::span<const std::int64_t> x0, double horizon) {
  CrnPath path;
  path.species_count = model.species_count();
  path.horizon = horizon;
  path.states.assign(x0.begin(), x0.end());
  path.reaction_counts.assign(model.reaction_count(), 0);
  return path;
}

void record_jump(CrnPath& path, const CrnState& zeta, std::size_t reaction, double t) {
  const std::size_t d = path.species_count;
  const std::size_t base = path.states.size() - d;
  for (std::size_t s = 0; s < d; ++s) {
    path.states.push_back(path.states[base + s] + zeta[s]);
  }
  path.jump_times.push_back(t);
  path.reaction_ids.push_back(reaction);
  ++path.reaction_counts[reaction];
}

}  // namespace

CrnPath simulate_crn_path(const CrnModel& model, const ParamVector& theta,
                          std::span<const std::int64_t> x0, double horizon, Stream& stream,
                          const CrnSimulationOptions& options) {
  check_state(model, x0, theta);
  if (!(horizon >= 0.0)) {
    throw InvalidArgument("horizon must be nonnegative");
  }
  const std::size_t m = model.reaction_count();
  const auto& zeta = model.stoichiometry();
  CrnPath path = start_path(model, x0, horizon);
  std::vector<double> props;

  next_reaction_loop(
      m, horizon, stream, options.max_jumps,
      [&](std::vector<double>& lambda) {
        model.propensities(path.terminal_state(), theta, props);
        if (props.size() != m) {
          throw ModelContractError("propensities returned " + std::to_string(props.size()) +
                                   " values, expected " + std::to_string(m));
        }
        std::copy(props.begin(), props.end(), lambda.begin());
      },
      [&](std::size_t k, double t) { record_jump(path, zeta[k], k, t); });

  instrumentation::counters().crn_paths.fetch_add(1, std::memory_order_relaxed);
  return path;
}

CoupledPairPath simulate_coupled_from(const CrnModel& model, const ParamVector& theta,
                                      std::span<const std::int64_t> x1,
                                      std::span<const std::int64_t> x2, double horizon,
                                      Stream& stream, const CrnSimulationOptions& options) {
  check_state(model, x1, theta);
  check_state(model, x2, theta);
  if (!(horizon >= 0.0)) {
    throw InvalidArgument("horizon must be nonnegative");
  }
  const std::size_t m = model.reaction_count();
  const auto& zeta = model.stoichiometry();
  CoupledPairPath pair{start_path(model, x1, horizon), start_path(model, x2, horizon)};
  std::vector<double> first;
  std::vector<double> second;

  // Channel 3j: shared part; 3j+1: excess of the first chain; 3j+2: excess
  // of the second chain.
  next_reaction_loop(
      3 * m, horizon, stream, options.max_jumps,
      [&](std::vector<double>& lambda) {
        model.propensities(pair.primary.terminal_state(), theta, first);
        model.propensities(pair.shifted.terminal_state(), theta, second);
        if (first.size() != m || second.size() != m) {
          throw ModelContractError("propensities returned the wrong number of values");
        }
        for (std::size_t j = 0; j < m; ++j) {
          const double shared = std::min(first[j], second[j]);
          lambda[3 * j] = shared;
          lambda[3 * j + 1] = first[j] - shared;
          lambda[3 * j + 2] = second[j] - shared;
        }
      },
      [&](std::size_t channel, double t) {
        const std::size_t j = channel / 3;
        const std::size_t part = channel % 3;
        if (part != 2) {
          record_jump(pair.primary, zeta[j], j, t);
        }
        if (part != 1) {
          record_jump(pair.shifted, zeta[j], j, t);
        }
      });

  instrumentation::counters().crn_paths.fetch_add(2, std::memory_order_relaxed);
  return pair;
}

CoupledPairPath simulate_coupled_pair(const CrnModel& model, const ParamVector& theta,
                                      std::span<const std::int64_t> x, std::size_t k,
                                      double t_start, Stream& stream,
                                      const CrnSimulationOptions& options) {
  if (k >= model.reaction_count()) {
    throw InvalidArgument("reaction index " + std::to_string(k) + " out of range");
  }
  if (!(t_start >= 0.0 && t_start < model.horizon())) {
    throw InvalidArgument("coupled pair start time must lie in [0, T)");
  }
  check_state(model, x, theta);
  CrnState shifted(x.begin(), x.end());
  const auto& zeta = model.stoichiometry()[k];
  for (std::size_t s = 0; s < shifted.size(); ++s) {
    shifted[s] += zeta[s];
    if (shifted[s] < 0) {
      throw ModelContractError("x + zeta_" + std::to_string(k) +
                               " leaves the nonnegative orthant");
    }
  }
  instrumentation::counters().auxiliary_pairs.fetch_add(1, std::memory_order_relaxed);
  return simulate_coupled_from(model, theta, x, shifted, model.horizon() - t_start, stream,
                               options);
}

}  // namespace gradest
