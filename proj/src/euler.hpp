#pragma once

// Euler-Maruyama step for one SDE model and the derivatives of that step
// with respect to the state. Shared by the path simulators and the pathwise
// estimators so that all of them consume random numbers identically.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gradest/error.hpp"
#include "gradest/models.hpp"
#include "gradest/rng.hpp"

namespace gradest::detail {

class EulerStepper {
 public:
  EulerStepper(const SdeModel& model, const ParamVector& theta)
      : model_(model), theta_(theta), d_(model.state_dim()), w_(model.noise_dim()) {
    if (theta.size() != model.param_count()) {
      throw InvalidArgument("theta has " + std::to_string(theta.size()) +
                            " entries, model expects " + std::to_string(model.param_count()));
    }
    step_jacobian_.resize(d_ * d_);
    step_hessian_.resize(d_ * d_ * d_);
  }

  std::size_t d() const noexcept { return d_; }
  std::size_t w() const noexcept { return w_; }

  static void draw_increments(Stream& stream, double sqrt_dt, std::span<double> out) {
    for (double& v : out) {
      v = sqrt_dt * stream.normal();
    }
  }

  void eval_coefficients(double t, std::span<const double> x) {
    model_.drift(t, x, theta_, mu_);
    model_.volatility(t, x, theta_, sigma_);
    expect(mu_, d_, "drift");
    expect(sigma_, d_ * w_, "volatility");
  }

  void eval_jacobians(double t, std::span<const double> x) {
    model_.drift_jacobian(t, x, theta_, jac_mu_);
    model_.volatility_jacobian(t, x, theta_, jac_sigma_);
    expect(jac_mu_, d_ * d_, "drift_jacobian");
    expect(jac_sigma_, d_ * w_ * d_, "volatility_jacobian");
  }

  void eval_hessians(double t, std::span<const double> x) {
    model_.drift_hessian(t, x, theta_, hess_mu_);
    model_.volatility_hessian(t, x, theta_, hess_sigma_);
    expect(hess_mu_, d_ * d_ * d_, "drift_hessian");
    expect(hess_sigma_, d_ * w_ * d_ * d_, "volatility_hessian");
  }

  // X' = X + mu dt + sigma dB with the cached coefficients.
  void advance_state(std::span<const double> x, double dt, std::span<const double> dB,
                     std::span<double> out) const {
    for (std::size_t a = 0; a < d_; ++a) {
      double next = x[a] + mu_[a] * dt;
      for (std::size_t j = 0; j < w_; ++j) {
        next += sigma_[a * w_ + j] * dB[j];
      }
      out[a] = next;
    }
  }

  // DF = I + grad(mu) dt + sum_j grad(sigma_j) dB_j, the Jacobian of the step.
  void build_step_jacobian(double dt, std::span<const double> dB) {
    for (std::size_t a = 0; a < d_; ++a) {
      for (std::size_t b = 0; b < d_; ++b) {
        double v = (a == b ? 1.0 : 0.0) + jac_mu_[a * d_ + b] * dt;
        for (std::size_t j = 0; j < w_; ++j) {
          v += jac_sigma_[(a * w_ + j) * d_ + b] * dB[j];
        }
        step_jacobian_[a * d_ + b] = v;
      }
    }
  }

  // D2F = hess(mu) dt + sum_j hess(sigma_j) dB_j.
  void build_step_hessian(double dt, std::span<const double> dB) {
    for (std::size_t a = 0; a < d_; ++a) {
      for (std::size_t bc = 0; bc < d_ * d_; ++bc) {
        double v = hess_mu_[a * d_ * d_ + bc] * dt;
        for (std::size_t j = 0; j < w_; ++j) {
          v += hess_sigma_[(a * w_ + j) * d_ * d_ + bc] * dB[j];
        }
        step_hessian_[a * d_ * d_ + bc] = v;
      }
    }
  }

  // J' = DF J
  void advance_first(std::span<const double> jac, std::span<double> out) const {
    for (std::size_t a = 0; a < d_; ++a) {
      for (std::size_t i = 0; i < d_; ++i) {
        double v = 0.0;
        for (std::size_t b = 0; b < d_; ++b) {
          v += step_jacobian_[a * d_ + b] * jac[b * d_ + i];
        }
        out[a * d_ + i] = v;
      }
    }
  }

  // K'_{a,ij} = sum_b DF_ab K_{b,ij} + sum_bc D2F_{a,bc} J_bi J_cj
  void advance_second(std::span<const double> jac, std::span<const double> second,
                      std::span<double> out) const {
    for (std::size_t a = 0; a < d_; ++a) {
      for (std::size_t i = 0; i < d_; ++i) {
        for (std::size_t j = 0; j < d_; ++j) {
          double v = 0.0;
          for (std::size_t b = 0; b < d_; ++b) {
            v += step_jacobian_[a * d_ + b] * second[(b * d_ + i) * d_ + j];
          }
          for (std::size_t b = 0; b < d_; ++b) {
            const double jbi = jac[b * d_ + i];
            for (std::size_t c = 0; c < d_; ++c) {
              v += step_hessian_[(a * d_ + b) * d_ + c] * jbi * jac[c * d_ + j];
            }
          }
          out[(a * d_ + i) * d_ + j] = v;
        }
      }
    }
  }

  const std::vector<double>& mu() const noexcept { return mu_; }
  const std::vector<double>& sigma() const noexcept { return sigma_; }
  const std::vector<double>& jac_mu() const noexcept { return jac_mu_; }
  const std::vector<double>& jac_sigma() const noexcept { return jac_sigma_; }

  static void check_finite(std::span<const double> x, std::size_t step) {
    for (const double v : x) {
      if (!std::isfinite(v)) {
        throw DivergenceError(step);
      }
    }
  }

 private:
  static void expect(const std::vector<double>& v, std::size_t size, const char* what) {
    if (v.size() != size) {
      throw ModelContractError(std::string(what) + " returned " + std::to_string(v.size()) +
                               " values, expected " + std::to_string(size));
    }
  }

  const SdeModel& model_;
  const ParamVector& theta_;
  std::size_t d_;
  std::size_t w_;
  std::vector<double> mu_;
  std::vector<double> sigma_;
  std::vector<double> jac_mu_;
  std::vector<double> jac_sigma_;
  std::vector<double> hess_mu_;
  std::vector<double> hess_sigma_;
  std::vector<double> step_jacobian_;
  std::vector<double> step_hessian_;
};

}  // namespace gradest::detail
