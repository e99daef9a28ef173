#include "gradest/instrumentation.hpp"

namespace gradest::instrumentation {

Counters& counters() noexcept {
  static Counters c;
  return c;
}

void reset() noexcept {
  Counters& c = counters();
  c.value_derivative_calls.store(0, std::memory_order_relaxed);
  c.auxiliary_pairs.store(0, std::memory_order_relaxed);
  c.sde_paths.store(0, std::memory_order_relaxed);
  c.crn_paths.store(0, std::memory_order_relaxed);
}

}  // namespace gradest::instrumentation
