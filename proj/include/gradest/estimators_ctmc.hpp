#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gradest/estimator_config.hpp"
#include "gradest/models.hpp"
#include "gradest/rng.hpp"

namespace gradest {

/// One replicate of the integral-path estimator for reaction networks.
///
/// Draws tau uniformly on [0, T], reads x = X(tau) from the main path and,
/// for every reaction k whose propensity depends on theta at x, spawns (with
/// probability beta) one split-coupled pair from (x, x + zeta_k) over
/// [tau, T]. Returns T sum_k d_i lambda_k(x) D_k with
/// D_k = [g(shifted) - g(primary)] / beta, or 0 when the pair was thinned.
std::vector<double> eipa_replicate(const CrnModel& model, const ParamVector& theta,
                                   std::span<const std::int64_t> x0,
                                   const EstimatorConfig& config, Stream& stream);

/// Likelihood-ratio replicate g(X(T)) * W_i for parameter i.
double girsanov_replicate(const CrnModel& model, const ParamVector& theta,
                          std::span<const std::int64_t> x0, std::size_t i,
                          const EstimatorConfig& config, Stream& stream);

/// Likelihood-ratio replicate for every parameter from one path.
std::vector<double> girsanov_replicate_all(const CrnModel& model, const ParamVector& theta,
                                           std::span<const std::int64_t> x0,
                                           const EstimatorConfig& config, Stream& stream);

/// Central difference in theta_i with the two chains sharing every
/// reaction's unit-rate clock.
double finite_difference_crn_replicate(const CrnModel& model, const ParamVector& theta,
                                       std::span<const std::int64_t> x0, std::size_t i,
                                       const EstimatorConfig& config, Stream& stream);

std::vector<double> finite_difference_crn_all(const CrnModel& model, const ParamVector& theta,
                                              std::span<const std::int64_t> x0,
                                              const EstimatorConfig& config, Stream& stream);

}  // namespace gradest
