#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gradest/models.hpp"
#include "gradest/rng.hpp"

namespace gradest {

/// Piecewise-constant reaction-network trajectory on [0, horizon].
struct CrnPath {
  std::size_t species_count = 0;
  double horizon = 0.0;
  std::vector<double> jump_times;
  std::vector<std::size_t> reaction_ids;
  std::vector<std::int64_t> states;  // (jumps + 1) x d; row 0 is the initial state
  std::vector<std::uint64_t> reaction_counts;

  std::size_t jump_count() const noexcept { return jump_times.size(); }

  std::span<const std::int64_t> state(std::size_t j) const {
    return {states.data() + j * species_count, species_count};
  }
  std::span<const std::int64_t> terminal_state() const { return state(jump_count()); }

  /// State holding at time t (right-continuous).
  std::span<const std::int64_t> state_at(double t) const;
};

struct CoupledPairPath {
  CrnPath primary;
  CrnPath shifted;
};

struct CrnSimulationOptions {
  std::size_t max_jumps = 10'000'000;
};

/// Exact simulation by the modified next reaction method: each reaction k
/// owns a unit-rate Poisson clock drawn from stream.child(k), and fires when
/// its internal time integral of lambda_k reaches the clock's next jump.
CrnPath simulate_crn_path(const CrnModel& model, const ParamVector& theta,
                          std::span<const std::int64_t> x0, double horizon, Stream& stream,
                          const CrnSimulationOptions& options = {});

/// Split coupling of the chains started at x and x + zeta_k over
/// [0, T - t_start].
CoupledPairPath simulate_coupled_pair(const CrnModel& model, const ParamVector& theta,
                                      std::span<const std::int64_t> x, std::size_t k,
                                      double t_start, Stream& stream,
                                      const CrnSimulationOptions& options = {});

/// Split coupling between two arbitrary admissible starting states. For every
/// reaction j one clock drives min(lambda_j(X1), lambda_j(X2)) in both chains
/// and two more clocks drive the excess of each chain on its own.
CoupledPairPath simulate_coupled_from(const CrnModel& model, const ParamVector& theta,
                                      std::span<const std::int64_t> x1,
                                      std::span<const std::int64_t> x2, double horizon,
                                      Stream& stream, const CrnSimulationOptions& options = {});

}  // namespace gradest
