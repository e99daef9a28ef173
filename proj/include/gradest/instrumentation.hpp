#pragma once

#include <atomic>
#include <cstdint>

namespace gradest::instrumentation {

// Process-wide call counters; relaxed increments, read by tests and the
// benchmark to confirm how much auxiliary work an estimator spawned.
struct Counters {
  std::atomic<std::uint64_t> value_derivative_calls{0};
  std::atomic<std::uint64_t> auxiliary_pairs{0};
  std::atomic<std::uint64_t> sde_paths{0};
  std::atomic<std::uint64_t> crn_paths{0};
};

Counters& counters() noexcept;
void reset() noexcept;

}  // namespace gradest::instrumentation
