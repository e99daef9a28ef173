#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gradest/estimator_config.hpp"
#include "gradest/models.hpp"
#include "gradest/rng.hpp"

namespace gradest {

/// One replicate of the generator gradient estimator of d/dtheta v(0, x0).
///
/// Simulates the main Euler path, draws tau uniformly on [0, T] and snaps it
/// to the preceding grid node k, estimates grad v and hess v at (t_k, X_k)
/// from auxiliary runs on stream.child(1), and returns for every i
///   T [grad v . d_i mu + Tr(hess v d_i a)](t_k, X_k)
///     + sum_k d_i rho(t_k, X_k) dt + d_i g(X_N).
/// The auxiliary estimate is computed once and shared by all parameters.
std::vector<double> generator_gradient_replicate(const SdeModel& model, const ParamVector& theta,
                                                 std::span<const double> x0,
                                                 const EstimatorConfig& config, Stream& stream);

/// Forward pathwise sensitivity: propagates dX/dtheta_i for all n parameters
/// alongside the path. Work per step grows linearly with n.
std::vector<double> pathwise_forward_replicate(const SdeModel& model, const ParamVector& theta,
                                               std::span<const double> x0,
                                               const EstimatorConfig& config, Stream& stream);

/// Central difference in theta_i on the main grid with common Brownian
/// increments for the two perturbed paths.
double finite_difference_sde_replicate(const SdeModel& model, const ParamVector& theta,
                                       std::span<const double> x0, std::size_t i,
                                       const EstimatorConfig& config, Stream& stream);

/// finite_difference_sde_replicate for every parameter, each from a copy of
/// `stream`.
std::vector<double> finite_difference_sde_all(const SdeModel& model, const ParamVector& theta,
                                              std::span<const double> x0,
                                              const EstimatorConfig& config, Stream& stream);

}  // namespace gradest
