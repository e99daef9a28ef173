#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gradest {

/// Law of the randomized evaluation time tau over [0, T].
enum class TimeRandomization { uniform };

std::string_view randomization_name(TimeRandomization r) noexcept;
TimeRandomization parse_randomization(std::string_view name);

struct EstimatorConfig {
  std::size_t n_samples = 1000;
  std::size_t steps_main = 256;
  /// Steps of each auxiliary run. 0 keeps the main grid's step size, so the
  /// auxiliary chain from node k is the same Euler chain as the main path.
  std::size_t steps_aux = 0;
  std::size_t n_aux = 16;
  TimeRandomization randomization = TimeRandomization::uniform;
  double thinning_beta = 1.0;
  double fd_step = 1e-3;
  std::uint64_t seed = 0;
  std::size_t max_jumps = 10'000'000;

  /// Throws ConfigError naming the first bad field.
  void validate() const;
};

struct GradientEstimate {
  std::vector<double> mean;
  std::vector<double> standard_error;
  std::size_t n_samples = 0;
  double wall_time_seconds = 0.0;
  std::string estimator_id;
  std::uint64_t seed = 0;
};

}  // namespace gradest
