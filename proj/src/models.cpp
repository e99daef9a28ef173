#include "gradest/models.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "gradest/error.hpp"

namespace gradest {

ParamVector::ParamVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) {
    throw InvalidArgument("parameter vector must not be empty");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InvalidArgument("parameter " + std::to_string(i) + " is not finite");
    }
  }
}

ParamVector ParamVector::perturbed(std::size_t i, double delta) const {
  if (i >= values_.size()) {
    throw InvalidArgument("parameter index " + std::to_string(i) + " out of range");
  }
  std::vector<double> shifted = values_;
  shifted[i] += delta;
  return ParamVector(std::move(shifted));
}

SdeModel::SdeModel(std::size_t state_dim, std::size_t noise_dim, std::size_t param_count,
                   double horizon)
    : state_dim_(state_dim), noise_dim_(noise_dim), param_count_(param_count),
      horizon_(horizon) {
  if (state_dim == 0 || noise_dim == 0 || param_count == 0) {
    throw InvalidArgument("SDE model dimensions must be positive");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw InvalidArgument("terminal time must be positive and finite");
  }
}

CrnModel::CrnModel(std::size_t species_count, std::vector<CrnState> stoichiometry,
                   std::size_t param_count, double horizon)
    : species_count_(species_count), stoichiometry_(std::move(stoichiometry)),
      param_count_(param_count), horizon_(horizon) {
  if (species_count == 0 || param_count == 0 || stoichiometry_.empty()) {
    throw InvalidArgument("reaction network dimensions must be positive");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw InvalidArgument("terminal time must be positive and finite");
  }
}

namespace {

void zeros(std::vector<double>& out, std::size_t n) { out.assign(n, 0.0); }

class CallbackSdeModel final : public SdeModel {
 public:
  explicit CallbackSdeModel(SdeCallbacks cb)
      : SdeModel(cb.state_dim, cb.noise_dim, cb.param_count, cb.horizon), cb_(std::move(cb)) {
    if (!cb_.drift || !cb_.volatility) {
      throw InvalidArgument("custom SDE model needs drift and volatility");
    }
  }

  std::string name() const override { return cb_.name; }

  void drift(double t, std::span<const double> x, const ParamVector& theta,
             std::vector<double>& out) const override {
    cb_.drift(t, x, theta, out);
  }
  void volatility(double t, std::span<const double> x, const ParamVector& theta,
                  std::vector<double>& out) const override {
    cb_.volatility(t, x, theta, out);
  }
  double reward_rate(double t, std::span<const double> x,
                     const ParamVector& theta) const override {
    return cb_.reward_rate ? cb_.reward_rate(t, x, theta) : 0.0;
  }
  double terminal_reward(std::span<const double> x, const ParamVector& theta) const override {
    return cb_.terminal_reward ? cb_.terminal_reward(x, theta) : 0.0;
  }

  void drift_param_derivative(double t, std::span<const double> x, const ParamVector& theta,
                              std::size_t i, std::vector<double>& out) const override {
    with_index(cb_.drift_param_derivative, t, x, theta, i, out, d());
  }
  void volatility_param_derivative(double t, std::span<const double> x,
                                   const ParamVector& theta, std::size_t i,
                                   std::vector<double>& out) const override {
    with_index(cb_.volatility_param_derivative, t, x, theta, i, out, d() * w());
  }
  double reward_rate_param_derivative(double t, std::span<const double> x,
                                      const ParamVector& theta, std::size_t i) const override {
    return cb_.reward_rate_param_derivative ? cb_.reward_rate_param_derivative(t, x, theta, i)
                                            : 0.0;
  }
  double terminal_reward_param_derivative(std::span<const double> x, const ParamVector& theta,
                                          std::size_t i) const override {
    return cb_.terminal_reward_param_derivative
               ? cb_.terminal_reward_param_derivative(x, theta, i)
               : 0.0;
  }

  void drift_jacobian(double t, std::span<const double> x, const ParamVector& theta,
                      std::vector<double>& out) const override {
    plain(cb_.drift_jacobian, t, x, theta, out, d() * d());
  }
  void volatility_jacobian(double t, std::span<const double> x, const ParamVector& theta,
                           std::vector<double>& out) const override {
    plain(cb_.volatility_jacobian, t, x, theta, out, d() * w() * d());
  }
  void drift_hessian(double t, std::span<const double> x, const ParamVector& theta,
                     std::vector<double>& out) const override {
    plain(cb_.drift_hessian, t, x, theta, out, d() * d() * d());
  }
  void volatility_hessian(double t, std::span<const double> x, const ParamVector& theta,
                          std::vector<double>& out) const override {
    plain(cb_.volatility_hessian, t, x, theta, out, d() * w() * d() * d());
  }
  void reward_rate_gradient(double t, std::span<const double> x, const ParamVector& theta,
                            std::vector<double>& out) const override {
    plain(cb_.reward_rate_gradient, t, x, theta, out, d());
  }
  void reward_rate_hessian(double t, std::span<const double> x, const ParamVector& theta,
                           std::vector<double>& out) const override {
    plain(cb_.reward_rate_hessian, t, x, theta, out, d() * d());
  }
  void terminal_reward_gradient(std::span<const double> x, const ParamVector& theta,
                                std::vector<double>& out) const override {
    if (cb_.terminal_reward_gradient) {
      cb_.terminal_reward_gradient(x, theta, out);
    } else {
      zeros(out, d());
    }
  }
  void terminal_reward_hessian(std::span<const double> x, const ParamVector& theta,
                               std::vector<double>& out) const override {
    if (cb_.terminal_reward_hessian) {
      cb_.terminal_reward_hessian(x, theta, out);
    } else {
      zeros(out, d() * d());
    }
  }

  bool has_reward_rate() const override {
    return cb_.reward_rate || cb_.reward_rate_param_derivative || cb_.reward_rate_gradient ||
           cb_.reward_rate_hessian;
  }

 private:
  std::size_t d() const { return state_dim(); }
  std::size_t w() const { return noise_dim(); }

  static void plain(const SdeCallbacks::Vec& f, double t, std::span<const double> x,
                    const ParamVector& theta, std::vector<double>& out, std::size_t size) {
    if (f) {
      f(t, x, theta, out);
    } else {
      zeros(out, size);
    }
  }
  static void with_index(const SdeCallbacks::VecI& f, double t, std::span<const double> x,
                         const ParamVector& theta, std::size_t i, std::vector<double>& out,
                         std::size_t size) {
    if (f) {
      f(t, x, theta, i, out);
    } else {
      zeros(out, size);
    }
  }

  SdeCallbacks cb_;
};

class CallbackCrnModel final : public CrnModel {
 public:
  explicit CallbackCrnModel(CrnCallbacks cb)
      : CrnModel(cb.species_count, cb.stoichiometry, cb.param_count, cb.horizon),
        cb_(std::move(cb)) {
    if (!cb_.propensities) {
      throw InvalidArgument("custom reaction network needs propensities");
    }
  }

  std::string name() const override { return cb_.name; }

  void propensities(std::span<const std::int64_t> x, const ParamVector& theta,
                    std::vector<double>& out) const override {
    cb_.propensities(x, theta, out);
  }
  void propensity_param_derivative(std::span<const std::int64_t> x, const ParamVector& theta,
                                   std::size_t i, std::vector<double>& out) const override {
    if (cb_.propensity_param_derivative) {
      cb_.propensity_param_derivative(x, theta, i, out);
    } else {
      zeros(out, reaction_count());
    }
  }
  double terminal_reward(std::span<const std::int64_t> x) const override {
    return cb_.terminal_reward ? cb_.terminal_reward(x) : 0.0;
  }

 private:
  CrnCallbacks cb_;
};

}  // namespace

std::shared_ptr<const SdeModel> make_sde_model(SdeCallbacks callbacks) {
  return std::make_shared<CallbackSdeModel>(std::move(callbacks));
}

std::shared_ptr<const CrnModel> make_crn_model(CrnCallbacks callbacks) {
  return std::make_shared<CallbackCrnModel>(std::move(callbacks));
}

void diffusion_matrix_from(std::span<const double> sigma, std::size_t d, std::size_t w,
                           std::vector<double>& out) {
  if (sigma.size() != d * w) {
    throw ModelContractError("volatility has " + std::to_string(sigma.size()) +
                             " entries, expected " + std::to_string(d * w));
  }
  out.assign(d * d, 0.0);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      double sum = 0.0;
      for (std::size_t j = 0; j < w; ++j) {
        sum += sigma[a * w + j] * sigma[b * w + j];
      }
      out[a * d + b] = 0.5 * sum;
      out[b * d + a] = 0.5 * sum;
    }
  }
}

void diffusion_matrix_derivative_from(std::span<const double> sigma,
                                      std::span<const double> d_sigma, std::size_t d,
                                      std::size_t w, std::vector<double>& out) {
  if (sigma.size() != d * w || d_sigma.size() != d * w) {
    throw ModelContractError("volatility derivative has wrong shape");
  }
  out.assign(d * d, 0.0);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      double sum = 0.0;
      for (std::size_t j = 0; j < w; ++j) {
        sum += d_sigma[a * w + j] * sigma[b * w + j] + sigma[a * w + j] * d_sigma[b * w + j];
      }
      out[a * d + b] = 0.5 * sum;
      out[b * d + a] = 0.5 * sum;
    }
  }
}

std::vector<double> diffusion_matrix(const SdeModel& model, double t,
                                     std::span<const double> x, const ParamVector& theta) {
  std::vector<double> sigma;
  model.volatility(t, x, theta, sigma);
  std::vector<double> a;
  diffusion_matrix_from(sigma, model.state_dim(), model.noise_dim(), a);
  return a;
}

std::vector<double> diffusion_matrix_param_derivative(const SdeModel& model, double t,
                                                      std::span<const double> x,
                                                      const ParamVector& theta,
                                                      std::size_t i) {
  if (i >= model.param_count()) {
    throw InvalidArgument("parameter index " + std::to_string(i) + " out of range (n = " +
                          std::to_string(model.param_count()) + ")");
  }
  std::vector<double> sigma;
  std::vector<double> d_sigma;
  model.volatility(t, x, theta, sigma);
  model.volatility_param_derivative(t, x, theta, i, d_sigma);
  std::vector<double> out;
  diffusion_matrix_derivative_from(sigma, d_sigma, model.state_dim(), model.noise_dim(), out);
  return out;
}

bool is_sde(const AnyModel& model) noexcept {
  return std::holds_alternative<std::shared_ptr<const SdeModel>>(model);
}

}  // namespace gradest
