#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gradest {

// Values double as CLI exit codes.
enum class ErrorCategory : int {
  config = 2,
  unknown_model = 3,
  unknown_estimator = 4,
  io = 5,
  model_contract = 6,
  divergence = 7,
  explosion = 8,
  score_undefined = 9,
  singular_system = 10,
  truncation = 11,
  invalid_argument = 12,
};

std::string_view category_name(ErrorCategory category) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

class UnknownModelError : public Error {
 public:
  explicit UnknownModelError(const std::string& id)
      : Error(ErrorCategory::unknown_model, "unknown model id '" + id + "'") {}
};

class UnknownEstimatorError : public Error {
 public:
  explicit UnknownEstimatorError(const std::string& id)
      : Error(ErrorCategory::unknown_estimator, "unknown estimator id '" + id + "'") {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

class ModelContractError : public Error {
 public:
  explicit ModelContractError(const std::string& what)
      : Error(ErrorCategory::model_contract, what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCategory::invalid_argument, what) {}
};

/// A simulated state became non-finite.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(std::size_t step)
      : Error(ErrorCategory::divergence,
              "non-finite state at step " + std::to_string(step)),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// A reaction-network path exceeded its jump cap.
class ExplosionError : public Error {
 public:
  explicit ExplosionError(std::size_t cap)
      : Error(ErrorCategory::explosion,
              "jump count exceeded cap of " + std::to_string(cap)),
        cap_(cap) {}

  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

class ScoreUndefinedError : public Error {
 public:
  explicit ScoreUndefinedError(const std::string& what)
      : Error(ErrorCategory::score_undefined, what) {}
};

class SingularSystemError : public Error {
 public:
  explicit SingularSystemError(const std::string& what)
      : Error(ErrorCategory::singular_system, what) {}
};

class TruncationError : public Error {
 public:
  TruncationError(double boundary_mass, double threshold)
      : Error(ErrorCategory::truncation,
              "probability mass " + std::to_string(boundary_mass) +
                  " on truncation boundary exceeds " + std::to_string(threshold)),
        boundary_mass_(boundary_mass) {}

  double boundary_mass() const noexcept { return boundary_mass_; }

 private:
  double boundary_mass_;
};

}  // namespace gradest
