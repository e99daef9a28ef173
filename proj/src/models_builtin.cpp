#include <algorithm>
#include <cmath>
#include <string>

#include "gradest/error.hpp"
#include "gradest/models.hpp"

namespace gradest {
namespace {

// One-dimensional SDE with a scalar Brownian motion; subclasses fill in the
// scalar coefficient functions and this adapter maps them onto the general
// array interface.
class ScalarSde : public SdeModel {
 public:
  ScalarSde(std::size_t param_count, double horizon) : SdeModel(1, 1, param_count, horizon) {}

  virtual double mu(double x, const ParamVector& th) const = 0;
  virtual double mu_x(double x, const ParamVector& th) const = 0;
  virtual double mu_xx(double x, const ParamVector& th) const = 0;
  virtual double mu_theta(double x, const ParamVector& th, std::size_t i) const = 0;
  virtual double sigma(double x, const ParamVector& th) const = 0;
  virtual double sigma_x(double x, const ParamVector& th) const = 0;
  virtual double sigma_xx(double x, const ParamVector& th) const = 0;
  virtual double sigma_theta(double x, const ParamVector& th, std::size_t i) const = 0;
  virtual double g(double x) const = 0;
  virtual double g_x(double x) const = 0;
  virtual double g_xx(double x) const = 0;

  void drift(double, std::span<const double> x, const ParamVector& th,
             std::vector<double>& out) const override {
    out.assign(1, mu(x[0], th));
  }
  void volatility(double, std::span<const double> x, const ParamVector& th,
                  std::vector<double>& out) const override {
    out.assign(1, sigma(x[0], th));
  }
  double reward_rate(double, std::span<const double>, const ParamVector&) const override {
    return 0.0;
  }
  double terminal_reward(std::span<const double> x, const ParamVector&) const override {
    return g(x[0]);
  }
  void drift_param_derivative(double, std::span<const double> x, const ParamVector& th,
                              std::size_t i, std::vector<double>& out) const override {
    out.assign(1, mu_theta(x[0], th, i));
  }
  void volatility_param_derivative(double, std::span<const double> x, const ParamVector& th,
                                   std::size_t i, std::vector<double>& out) const override {
    out.assign(1, sigma_theta(x[0], th, i));
  }
  double reward_rate_param_derivative(double, std::span<const double>, const ParamVector&,
                                      std::size_t) const override {
    return 0.0;
  }
  double terminal_reward_param_derivative(std::span<const double>, const ParamVector&,
                                          std::size_t) const override {
    return 0.0;
  }
  void drift_jacobian(double, std::span<const double> x, const ParamVector& th,
                      std::vector<double>& out) const override {
    out.assign(1, mu_x(x[0], th));
  }
  void volatility_jacobian(double, std::span<const double> x, const ParamVector& th,
                           std::vector<double>& out) const override {
    out.assign(1, sigma_x(x[0], th));
  }
  void drift_hessian(double, std::span<const double> x, const ParamVector& th,
                     std::vector<double>& out) const override {
    out.assign(1, mu_xx(x[0], th));
  }
  void volatility_hessian(double, std::span<const double> x, const ParamVector& th,
                          std::vector<double>& out) const override {
    out.assign(1, sigma_xx(x[0], th));
  }
  void reward_rate_gradient(double, std::span<const double>, const ParamVector&,
                            std::vector<double>& out) const override {
    out.assign(1, 0.0);
  }
  void reward_rate_hessian(double, std::span<const double>, const ParamVector&,
                           std::vector<double>& out) const override {
    out.assign(1, 0.0);
  }
  void terminal_reward_gradient(std::span<const double> x, const ParamVector&,
                                std::vector<double>& out) const override {
    out.assign(1, g_x(x[0]));
  }
  void terminal_reward_hessian(std::span<const double> x, const ParamVector&,
                               std::vector<double>& out) const override {
    out.assign(1, g_xx(x[0]));
  }
  bool has_reward_rate() const override { return false; }
};

// dX = theta dt + dB, g(x) = x.
class DriftedBrownianMotion final : public ScalarSde {
 public:
  explicit DriftedBrownianMotion(double horizon) : ScalarSde(1, horizon) {}
  std::string name() const override { return "drifted-bm"; }

  double mu(double, const ParamVector& th) const override { return th[0]; }
  double mu_x(double, const ParamVector&) const override { return 0.0; }
  double mu_xx(double, const ParamVector&) const override { return 0.0; }
  double mu_theta(double, const ParamVector&, std::size_t) const override { return 1.0; }
  double sigma(double, const ParamVector&) const override { return 1.0; }
  double sigma_x(double, const ParamVector&) const override { return 0.0; }
  double sigma_xx(double, const ParamVector&) const override { return 0.0; }
  double sigma_theta(double, const ParamVector&, std::size_t) const override { return 0.0; }
  double g(double x) const override { return x; }
  double g_x(double) const override { return 1.0; }
  double g_xx(double) const override { return 0.0; }
};

// dX = -theta1 X dt + theta2 dB, g(x) = x^2.
class OrnsteinUhlenbeck final : public ScalarSde {
 public:
  explicit OrnsteinUhlenbeck(double horizon) : ScalarSde(2, horizon) {}
  std::string name() const override { return "ou"; }

  double mu(double x, const ParamVector& th) const override { return -th[0] * x; }
  double mu_x(double, const ParamVector& th) const override { return -th[0]; }
  double mu_xx(double, const ParamVector&) const override { return 0.0; }
  double mu_theta(double x, const ParamVector&, std::size_t i) const override {
    return i == 0 ? -x : 0.0;
  }
  double sigma(double, const ParamVector& th) const override { return th[1]; }
  double sigma_x(double, const ParamVector&) const override { return 0.0; }
  double sigma_xx(double, const ParamVector&) const override { return 0.0; }
  double sigma_theta(double, const ParamVector&, std::size_t i) const override {
    return i == 1 ? 1.0 : 0.0;
  }
  double g(double x) const override { return x * x; }
  double g_x(double x) const override { return 2.0 * x; }
  double g_xx(double) const override { return 2.0; }
};

// dX = theta1 X dt + theta2 X dB, g(x) = x.
class GeometricBrownianMotion final : public ScalarSde {
 public:
  explicit GeometricBrownianMotion(double horizon) : ScalarSde(2, horizon) {}
  std::string name() const override { return "gbm"; }

  double mu(double x, const ParamVector& th) const override { return th[0] * x; }
  double mu_x(double, const ParamVector& th) const override { return th[0]; }
  double mu_xx(double, const ParamVector&) const override { return 0.0; }
  double mu_theta(double x, const ParamVector&, std::size_t i) const override {
    return i == 0 ? x : 0.0;
  }
  double sigma(double x, const ParamVector& th) const override { return th[1] * x; }
  double sigma_x(double, const ParamVector& th) const override { return th[1]; }
  double sigma_xx(double, const ParamVector&) const override { return 0.0; }
  double sigma_theta(double x, const ParamVector&, std::size_t i) const override {
    return i == 1 ? x : 0.0;
  }
  double g(double x) const override { return x; }
  double g_x(double) const override { return 1.0; }
  double g_xx(double) const override { return 0.0; }
};

// dX = (-kappa X + sum_i theta_i phi_i(X)) dt + s dB, g(x) = x.
//
// phi_i(x) = psi((x - c_i) / r) with psi(u) = (1 - u^2)^4 on |u| < 1, a C^3
// bump. Centers are evenly spaced on [-L, L] and the radius is twice the
// spacing, so at most five features are nonzero at any x and evaluating the
// drift costs the same for every n.
class FeatureDrift final : public ScalarSde {
 public:
  static constexpr double kappa = 1.0;
  static constexpr double noise = 0.5;
  static constexpr double half_width = 2.0;

  FeatureDrift(std::size_t n, double horizon) : ScalarSde(n, horizon) {
    if (n == 1) {
      first_center_ = 0.0;
      spacing_ = 2.0 * half_width;
    } else {
      first_center_ = -half_width;
      spacing_ = 2.0 * half_width / static_cast<double>(n - 1);
    }
    radius_ = 2.0 * spacing_;
    if (n == 1) {
      radius_ = half_width;
    }
  }

  std::string name() const override { return "feature-drift"; }

  double mu(double x, const ParamVector& th) const override {
    double sum = -kappa * x;
    for_each_active(x, [&](std::size_t i, double u) { sum += th[i] * bump(u); });
    return sum;
  }
  double mu_x(double x, const ParamVector& th) const override {
    double sum = -kappa;
    for_each_active(x, [&](std::size_t i, double u) { sum += th[i] * bump_d1(u) / radius_; });
    return sum;
  }
  double mu_xx(double x, const ParamVector& th) const override {
    double sum = 0.0;
    for_each_active(x, [&](std::size_t i, double u) {
      sum += th[i] * bump_d2(u) / (radius_ * radius_);
    });
    return sum;
  }
  double mu_theta(double x, const ParamVector&, std::size_t i) const override {
    const double u = (x - center(i)) / radius_;
    return std::abs(u) < 1.0 ? bump(u) : 0.0;
  }
  double sigma(double, const ParamVector&) const override { return noise; }
  double sigma_x(double, const ParamVector&) const override { return 0.0; }
  double sigma_xx(double, const ParamVector&) const override { return 0.0; }
  double sigma_theta(double, const ParamVector&, std::size_t) const override { return 0.0; }
  double g(double x) const override { return x; }
  double g_x(double) const override { return 1.0; }
  double g_xx(double) const override { return 0.0; }

 private:
  double center(std::size_t i) const { return first_center_ + spacing_ * static_cast<double>(i); }

  template <typename F>
  void for_each_active(double x, F&& f) const {
    const double n = static_cast<double>(param_count());
    const double lo = std::ceil((x - radius_ - first_center_) / spacing_);
    const double hi = std::floor((x + radius_ - first_center_) / spacing_);
    const double first = std::max(lo, 0.0);
    const double last = std::min(hi, n - 1.0);
    for (double k = first; k <= last; k += 1.0) {
      const auto i = static_cast<std::size_t>(k);
      const double u = (x - center(i)) / radius_;
      if (std::abs(u) < 1.0) {
        f(i, u);
      }
    }
  }

  static double bump(double u) {
    const double s = 1.0 - u * u;
    return s * s * s * s;
  }
  static double bump_d1(double u) {
    const double s = 1.0 - u * u;
    return -8.0 * u * s * s * s;
  }
  static double bump_d2(double u) {
    const double s = 1.0 - u * u;
    return -8.0 * s * s * s + 48.0 * u * u * s * s;
  }

  double first_center_ = 0.0;
  double spacing_ = 1.0;
  double radius_ = 1.0;
};

class PureBirth final : public CrnModel {
 public:
  explicit PureBirth(double horizon) : CrnModel(1, {{1}}, 1, horizon) {}
  std::string name() const override { return "pure-birth"; }

  void propensities(std::span<const std::int64_t>, const ParamVector& th,
                    std::vector<double>& out) const override {
    out.assign(1, th[0]);
  }
  void propensity_param_derivative(std::span<const std::int64_t>, const ParamVector&,
                                   std::size_t, std::vector<double>& out) const override {
    out.assign(1, 1.0);
  }
  double terminal_reward(std::span<const std::int64_t> x) const override {
    return static_cast<double>(x[0]);
  }
};

class BirthDeath final : public CrnModel {
 public:
  explicit BirthDeath(double horizon) : CrnModel(1, {{1}, {-1}}, 2, horizon) {}
  std::string name() const override { return "birth-death"; }

  void propensities(std::span<const std::int64_t> x, const ParamVector& th,
                    std::vector<double>& out) const override {
    out.resize(2);
    out[0] = th[0];
    out[1] = th[1] * static_cast<double>(x[0]);
  }
  void propensity_param_derivative(std::span<const std::int64_t> x, const ParamVector&,
                                   std::size_t i, std::vector<double>& out) const override {
    out.assign(2, 0.0);
    if (i == 0) {
      out[0] = 1.0;
    } else {
      out[1] = static_cast<double>(x[0]);
    }
  }
  double terminal_reward(std::span<const std::int64_t> x) const override {
    return static_cast<double>(x[0]);
  }
};

// Species (mRNA, protein). Transcription, mRNA decay, translation, protein
// decay; the reward is the protein count.
class GeneExpression final : public CrnModel {
 public:
  explicit GeneExpression(double horizon)
      : CrnModel(2, {{1, 0}, {-1, 0}, {0, 1}, {0, -1}}, 4, horizon) {}
  std::string name() const override { return "gene-expression"; }

  void propensities(std::span<const std::int64_t> x, const ParamVector& th,
                    std::vector<double>& out) const override {
    const double mrna = static_cast<double>(x[0]);
    const double protein = static_cast<double>(x[1]);
    out.resize(4);
    out[0] = th[0];
    out[1] = th[1] * mrna;
    out[2] = th[2] * mrna;
    out[3] = th[3] * protein;
  }
  void propensity_param_derivative(std::span<const std::int64_t> x, const ParamVector&,
                                   std::size_t i, std::vector<double>& out) const override {
    out.assign(4, 0.0);
    switch (i) {
      case 0:
        out[0] = 1.0;
        break;
      case 1:
        out[1] = static_cast<double>(x[0]);
        break;
      case 2:
        out[2] = static_cast<double>(x[0]);
        break;
      default:
        out[3] = static_cast<double>(x[1]);
        break;
    }
  }
  double terminal_reward(std::span<const std::int64_t> x) const override {
    return static_cast<double>(x[1]);
  }
};

}  // namespace

std::vector<std::string> builtin_model_ids() {
  return {"drifted-bm", "ou", "gbm", "feature-drift", "pure-birth", "birth-death",
          "gene-expression"};
}

BuiltinModel builtin_model(std::string_view id, const BuiltinOptions& options) {
  const auto horizon = [&](double fallback) { return options.horizon.value_or(fallback); };
  BuiltinModel out;
  out.id = std::string(id);
  if (id == "drifted-bm") {
    out.model = std::shared_ptr<const SdeModel>(std::make_shared<DriftedBrownianMotion>(horizon(1.0)));
    out.default_theta = {0.5};
    out.default_x0 = {0.0};
  } else if (id == "ou") {
    out.model = std::shared_ptr<const SdeModel>(std::make_shared<OrnsteinUhlenbeck>(horizon(1.0)));
    out.default_theta = {1.0, 0.5};
    out.default_x0 = {1.0};
  } else if (id == "gbm") {
    out.model = std::shared_ptr<const SdeModel>(
        std::make_shared<GeometricBrownianMotion>(horizon(1.0)));
    out.default_theta = {0.1, 0.2};
    out.default_x0 = {1.0};
  } else if (id == "feature-drift") {
    const std::size_t n = options.n_features.value_or(8);
    if (n == 0) {
      throw InvalidArgument("feature-drift needs at least one feature");
    }
    out.model = std::shared_ptr<const SdeModel>(std::make_shared<FeatureDrift>(n, horizon(1.0)));
    out.default_theta.assign(n, 0.5);
    out.default_x0 = {0.0};
  } else if (id == "pure-birth") {
    out.model = std::shared_ptr<const CrnModel>(std::make_shared<PureBirth>(horizon(1.0)));
    out.default_theta = {2.0};
    out.default_x0 = {0.0};
  } else if (id == "birth-death") {
    out.model = std::shared_ptr<const CrnModel>(std::make_shared<BirthDeath>(horizon(2.0)));
    out.default_theta = {10.0, 1.0};
    out.default_x0 = {0.0};
  } else if (id == "gene-expression") {
    out.model = std::shared_ptr<const CrnModel>(std::make_shared<GeneExpression>(horizon(2.0)));
    out.default_theta = {4.0, 1.0, 2.0, 0.5};
    out.default_x0 = {0.0, 0.0};
  } else {
    throw UnknownModelError(std::string(id));
  }
  return out;
}

}  // namespace gradest
