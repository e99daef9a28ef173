#include "gradest/error.hpp"

namespace gradest {

std::string_view category_name(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::unknown_model: return "unknown_model";
    case ErrorCategory::unknown_estimator: return "unknown_estimator";
    case ErrorCategory::io: return "io";
    case ErrorCategory::model_contract: return "model_contract";
    case ErrorCategory::divergence: return "divergence";
    case ErrorCategory::explosion: return "explosion";
    case ErrorCategory::score_undefined: return "score_undefined";
    case ErrorCategory::singular_system: return "singular_system";
    case ErrorCategory::truncation: return "truncation";
    case ErrorCategory::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

}  // namespace gradest
