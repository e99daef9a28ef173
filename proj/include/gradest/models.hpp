#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gradest {

/// Parameter vector theta. Never empty; every entry finite.
class ParamVector {
 public:
  explicit ParamVector(std::vector<double> values);
  ParamVector(std::initializer_list<double> values)
      : ParamVector(std::vector<double>(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  /// Copy with theta[i] shifted by `delta`.
  ParamVector perturbed(std::size_t i, double delta) const;

 private:
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Ito SDE  dX = mu(t, X) dt + sigma(t, X) dB  with rewards rho (rate) and g.
//
// Layout of the outputs, all row-major in a std::vector<double> the model
// resizes:
//   drift                 [d]           mu_a
//   volatility            [d*w]         sigma_{a j} at a*w + j
//   drift_jacobian        [d*d]         d mu_a / d x_b at a*d + b
//   volatility_jacobian   [d*w*d]       d sigma_{aj} / d x_b at (a*w + j)*d + b
//   drift_hessian         [d*d*d]       d2 mu_a / dx_b dx_c at (a*d + b)*d + c
//   volatility_hessian    [d*w*d*d]     ((a*w + j)*d + b)*d + c
//   *_gradient            [d], *_hessian [d*d]
// Parametric derivatives take the parameter index i and have the shape of
// the coefficient they differentiate.
// ---------------------------------------------------------------------------
class SdeModel {
 public:
  SdeModel(std::size_t state_dim, std::size_t noise_dim, std::size_t param_count,
           double horizon);
  virtual ~SdeModel() = default;

  virtual std::string name() const = 0;

  std::size_t state_dim() const noexcept { return state_dim_; }
  std::size_t noise_dim() const noexcept { return noise_dim_; }
  std::size_t param_count() const noexcept { return param_count_; }
  double horizon() const noexcept { return horizon_; }

  virtual void drift(double t, std::span<const double> x, const ParamVector& theta,
                     std::vector<double>& out) const = 0;
  virtual void volatility(double t, std::span<const double> x, const ParamVector& theta,
                          std::vector<double>& out) const = 0;
  virtual double reward_rate(double t, std::span<const double> x,
                             const ParamVector& theta) const = 0;
  virtual double terminal_reward(std::span<const double> x,
                                 const ParamVector& theta) const = 0;

  virtual void drift_param_derivative(double t, std::span<const double> x,
                                      const ParamVector& theta, std::size_t i,
                                      std::vector<double>& out) const = 0;
  virtual void volatility_param_derivative(double t, std::span<const double> x,
                                           const ParamVector& theta, std::size_t i,
                                           std::vector<double>& out) const = 0;
  virtual double reward_rate_param_derivative(double t, std::span<const double> x,
                                              const ParamVector& theta,
                                              std::size_t i) const = 0;
  virtual double terminal_reward_param_derivative(std::span<const double> x,
                                                  const ParamVector& theta,
                                                  std::size_t i) const = 0;

  virtual void drift_jacobian(double t, std::span<const double> x, const ParamVector& theta,
                              std::vector<double>& out) const = 0;
  virtual void volatility_jacobian(double t, std::span<const double> x,
                                   const ParamVector& theta,
                                   std::vector<double>& out) const = 0;
  virtual void drift_hessian(double t, std::span<const double> x, const ParamVector& theta,
                             std::vector<double>& out) const = 0;
  virtual void volatility_hessian(double t, std::span<const double> x,
                                  const ParamVector& theta,
                                  std::vector<double>& out) const = 0;

  virtual void reward_rate_gradient(double t, std::span<const double> x,
                                    const ParamVector& theta,
                                    std::vector<double>& out) const = 0;
  virtual void reward_rate_hessian(double t, std::span<const double> x,
                                   const ParamVector& theta,
                                   std::vector<double>& out) const = 0;
  virtual void terminal_reward_gradient(std::span<const double> x, const ParamVector& theta,
                                        std::vector<double>& out) const = 0;
  virtual void terminal_reward_hessian(std::span<const double> x, const ParamVector& theta,
                                       std::vector<double>& out) const = 0;

  /// False when rho and all of its derivatives vanish identically; lets the
  /// engines skip the reward-rate quadrature.
  virtual bool has_reward_rate() const { return true; }

 private:
  std::size_t state_dim_;
  std::size_t noise_dim_;
  std::size_t param_count_;
  double horizon_;
};

/// SdeModel assembled from callables. Any callable left empty evaluates to
/// zeros of the documented shape.
struct SdeCallbacks {
  using Vec = std::function<void(double, std::span<const double>, const ParamVector&,
                                 std::vector<double>&)>;
  using VecI = std::function<void(double, std::span<const double>, const ParamVector&,
                                  std::size_t, std::vector<double>&)>;
  using Scalar = std::function<double(double, std::span<const double>, const ParamVector&)>;
  using ScalarI = std::function<double(double, std::span<const double>, const ParamVector&,
                                       std::size_t)>;
  using Terminal = std::function<double(std::span<const double>, const ParamVector&)>;
  using TerminalI =
      std::function<double(std::span<const double>, const ParamVector&, std::size_t)>;
  using TerminalVec =
      std::function<void(std::span<const double>, const ParamVector&, std::vector<double>&)>;

  std::string name = "custom-sde";
  std::size_t state_dim = 1;
  std::size_t noise_dim = 1;
  std::size_t param_count = 1;
  double horizon = 1.0;

  Vec drift;
  Vec volatility;
  Scalar reward_rate;
  Terminal terminal_reward;
  VecI drift_param_derivative;
  VecI volatility_param_derivative;
  ScalarI reward_rate_param_derivative;
  TerminalI terminal_reward_param_derivative;
  Vec drift_jacobian;
  Vec volatility_jacobian;
  Vec drift_hessian;
  Vec volatility_hessian;
  Vec reward_rate_gradient;
  Vec reward_rate_hessian;
  TerminalVec terminal_reward_gradient;
  TerminalVec terminal_reward_hessian;
};

std::shared_ptr<const SdeModel> make_sde_model(SdeCallbacks callbacks);

// ---------------------------------------------------------------------------
// Reaction network: d species, m reactions with stoichiometric rows zeta_k.
// ---------------------------------------------------------------------------
using CrnState = std::vector<std::int64_t>;

class CrnModel {
 public:
  CrnModel(std::size_t species_count, std::vector<CrnState> stoichiometry,
           std::size_t param_count, double horizon);
  virtual ~CrnModel() = default;

  virtual std::string name() const = 0;

  std::size_t species_count() const noexcept { return species_count_; }
  std::size_t reaction_count() const noexcept { return stoichiometry_.size(); }
  std::size_t param_count() const noexcept { return param_count_; }
  double horizon() const noexcept { return horizon_; }
  const std::vector<CrnState>& stoichiometry() const noexcept { return stoichiometry_; }

  /// Propensities lambda_k(x), k < m. Must vanish whenever x + zeta_k leaves
  /// the nonnegative orthant.
  virtual void propensities(std::span<const std::int64_t> x, const ParamVector& theta,
                            std::vector<double>& out) const = 0;
  virtual void propensity_param_derivative(std::span<const std::int64_t> x,
                                           const ParamVector& theta, std::size_t i,
                                           std::vector<double>& out) const = 0;
  virtual double terminal_reward(std::span<const std::int64_t> x) const = 0;

 private:
  std::size_t species_count_;
  std::vector<CrnState> stoichiometry_;
  std::size_t param_count_;
  double horizon_;
};

struct CrnCallbacks {
  using Rates = std::function<void(std::span<const std::int64_t>, const ParamVector&,
                                   std::vector<double>&)>;
  using RatesI = std::function<void(std::span<const std::int64_t>, const ParamVector&,
                                    std::size_t, std::vector<double>&)>;

  std::string name = "custom-crn";
  std::size_t species_count = 1;
  std::vector<CrnState> stoichiometry;
  std::size_t param_count = 1;
  double horizon = 1.0;

  Rates propensities;
  RatesI propensity_param_derivative;  // zeros when empty
  std::function<double(std::span<const std::int64_t>)> terminal_reward;
};

std::shared_ptr<const CrnModel> make_crn_model(CrnCallbacks callbacks);

// ---------------------------------------------------------------------------
// Diffusion matrix a = sigma sigma^T / 2 and its parametric derivative.
// ---------------------------------------------------------------------------

/// a = sigma sigma^T / 2 for a row-major d x w sigma; `out` becomes d x d.
void diffusion_matrix_from(std::span<const double> sigma, std::size_t d, std::size_t w,
                           std::vector<double>& out);

/// (d_sigma sigma^T + sigma d_sigma^T) / 2; `out` becomes d x d.
void diffusion_matrix_derivative_from(std::span<const double> sigma,
                                      std::span<const double> d_sigma, std::size_t d,
                                      std::size_t w, std::vector<double>& out);

std::vector<double> diffusion_matrix(const SdeModel& model, double t,
                                     std::span<const double> x, const ParamVector& theta);

std::vector<double> diffusion_matrix_param_derivative(const SdeModel& model, double t,
                                                      std::span<const double> x,
                                                      const ParamVector& theta,
                                                      std::size_t i);

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------
struct SdeProbe {
  double t;
  std::vector<double> x;
  ParamVector theta;
};

struct CrnProbe {
  CrnState x;
  ParamVector theta;
};

enum class ViolationKind {
  shape,
  non_finite,
  domain,
  not_psd,
  negative_propensity,
  admissibility,
  stoichiometry,
};

std::string_view violation_name(ViolationKind kind) noexcept;

struct Violation {
  ViolationKind kind;
  std::size_t probe_index;
  std::string message;
};

struct ValidationReport {
  std::size_t probes_checked = 0;
  std::optional<Violation> first_violation;

  bool passed() const noexcept { return !first_violation.has_value(); }
};

ValidationReport validate_model(const SdeModel& model, std::span<const SdeProbe> probes);
ValidationReport validate_model(const CrnModel& model, std::span<const CrnProbe> probes);

/// Throws ModelContractError carrying the first violation.
void require_valid(const ValidationReport& report);

/// Central-difference consistency of every analytic derivative a model
/// supplies. A quantity passes when its largest |analytic - fd| over all
/// probes is at most tol * max(1, largest |analytic| over all probes).
struct DerivativeCheck {
  std::string quantity;
  double max_error = 0.0;
  bool passed = true;
};

std::vector<DerivativeCheck> check_derivatives(const SdeModel& model,
                                               std::span<const SdeProbe> probes,
                                               double step = 1e-4, double tol = 1e-5);
std::vector<DerivativeCheck> check_derivatives(const CrnModel& model,
                                               std::span<const CrnProbe> probes,
                                               double step = 1e-4, double tol = 1e-5);

// ---------------------------------------------------------------------------
// Built-in model catalog
// ---------------------------------------------------------------------------
using AnyModel = std::variant<std::shared_ptr<const SdeModel>, std::shared_ptr<const CrnModel>>;

struct BuiltinOptions {
  std::optional<std::size_t> n_features;  // feature-drift only
  std::optional<double> horizon;          // catalog default when empty
};

struct BuiltinModel {
  std::string id;
  AnyModel model;
  std::vector<double> default_theta;
  std::vector<double> default_x0;
};

/// Catalog ids: drifted-bm, ou, gbm, feature-drift, pure-birth, birth-death,
/// gene-expression. Throws UnknownModelError.
BuiltinModel builtin_model(std::string_view id, const BuiltinOptions& options = {});

std::vector<std::string> builtin_model_ids();

bool is_sde(const AnyModel& model) noexcept;

}  // namespace gradest
