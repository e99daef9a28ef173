#include "gradest/estimator_config.hpp"

#include <cmath>
#include <string>

#include "gradest/error.hpp"

namespace gradest {

std::string_view randomization_name(TimeRandomization r) noexcept {
  switch (r) {
    case TimeRandomization::uniform:
      return "uniform";
  }
  return "unknown";
}

TimeRandomization parse_randomization(std::string_view name) {
  if (name == "uniform") {
    return TimeRandomization::uniform;
  }
  throw ConfigError("unknown randomization '" + std::string(name) + "'");
}

void EstimatorConfig::validate() const {
  if (n_samples < 1) {
    throw ConfigError("n_samples must be at least 1");
  }
  if (steps_main < 1) {
    throw ConfigError("steps_main must be at least 1");
  }
  if (n_aux < 1) {
    throw ConfigError("n_aux must be at least 1");
  }
  if (!(thinning_beta > 0.0 && thinning_beta <= 1.0)) {
    throw ConfigError("thinning_beta must lie in (0, 1]");
  }
  if (!(fd_step > 0.0) || !std::isfinite(fd_step)) {
    throw ConfigError("fd_step must be positive");
  }
  if (max_jumps < 1) {
    throw ConfigError("max_jumps must be at least 1");
  }
}

}  // namespace gradest
