#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <variant>

#include "gradest/error.hpp"
#include "gradest/estimators_ctmc.hpp"
#include "gradest/estimators_sde.hpp"
#include "gradest/harness.hpp"
#include "gradest/simd/kernels.hpp"

namespace gradest {

std::vector<std::string> estimator_ids() {
  return {"gge", "pathwise", "fd-sde", "eipa", "girsanov", "fd-crn"};
}

bool estimator_is_sde(std::string_view id) {
  if (id == "gge" || id == "pathwise" || id == "fd-sde") {
    return true;
  }
  if (id == "eipa" || id == "girsanov" || id == "fd-crn") {
    return false;
  }
  throw UnknownEstimatorError(std::string(id));
}

namespace {

std::vector<std::int64_t> integer_state(std::span<const double> x0) {
  std::vector<std::int64_t> out;
  out.reserve(x0.size());
  for (const double v : x0) {
    if (v < 0.0 || v != std::floor(v)) {
      throw InvalidArgument("reaction-network state must be nonnegative integers");
    }
    out.push_back(static_cast<std::int64_t>(v));
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::vector<double> run_replicate(std::string_view estimator_id, const AnyModel& model,
                                  const ParamVector& theta, std::span<const double> x0,
                                  const EstimatorConfig& config, Stream& stream) {
  const bool wants_sde = estimator_is_sde(estimator_id);
  if (wants_sde != is_sde(model)) {
    throw ConfigError("estimator '" + std::string(estimator_id) +
                      "' does not apply to this model type");
  }
  if (wants_sde) {
    const SdeModel& sde = *std::get<std::shared_ptr<const SdeModel>>(model);
    if (estimator_id == "gge") {
      return generator_gradient_replicate(sde, theta, x0, config, stream);
    }
    if (estimator_id == "pathwise") {
      return pathwise_forward_replicate(sde, theta, x0, config, stream);
    }
    return finite_difference_sde_all(sde, theta, x0, config, stream);
  }
  const CrnModel& crn = *std::get<std::shared_ptr<const CrnModel>>(model);
  const auto state = integer_state(x0);
  if (estimator_id == "eipa") {
    return eipa_replicate(crn, theta, state, config, stream);
  }
  if (estimator_id == "girsanov") {
    return girsanov_replicate_all(crn, theta, state, config, stream);
  }
  return finite_difference_crn_all(crn, theta, state, config, stream);
}

SampleStatistics aggregate_statistics(std::span<const std::vector<double>> samples) {
  if (samples.empty()) {
    throw InvalidArgument("aggregate_statistics needs at least one sample");
  }
  const std::size_t width = samples.front().size();
  for (const auto& s : samples) {
    if (s.size() != width) {
      throw InvalidArgument("samples have inconsistent lengths");
    }
  }
  const auto& kern = simd::kernels();
  const double count = static_cast<double>(samples.size());
  SampleStatistics out;
  out.mean.assign(width, 0.0);
  for (const auto& s : samples) {
    kern.axpy(1.0, s.data(), out.mean.data(), width);
  }
  for (double& m : out.mean) {
    m /= count;
  }
  out.standard_error.assign(width, 0.0);
  if (samples.size() < 2) {
    return out;
  }
  for (const auto& s : samples) {
    kern.squared_deviation(s.data(), out.mean.data(), out.standard_error.data(), width);
  }
  for (double& v : out.standard_error) {
    v = std::sqrt(v / (count - 1.0)) / std::sqrt(count);
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  BuiltinOptions opts;
  opts.horizon = config.horizon;
  opts.n_features = config.n_features;
  const BuiltinModel built = builtin_model(config.model_id, opts);

  ExperimentReport report;
  report.config = config;
  report.config.theta = config.theta.value_or(built.default_theta);
  report.config.x0 = config.x0.value_or(built.default_x0);
  report.config.horizon = std::visit([](const auto& m) { return m->horizon(); }, built.model);
  if (config.model_id == "feature-drift") {
    report.config.n_features = built.default_theta.size();
  }
  const ParamVector theta(*report.config.theta);
  const std::vector<double>& x0 = *report.config.x0;
  const EstimatorConfig& est = config.estimator;

  const auto start = std::chrono::steady_clock::now();
  std::vector<std::vector<double>> samples(est.n_samples);
  const Stream root(est.seed);
  const std::size_t workers = std::min(config.workers, est.n_samples);
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto work = [&](std::size_t first) {
    try {
      for (std::size_t r = first; r < est.n_samples; r += workers) {
        Stream stream = root.child(r);
        samples[r] = run_replicate(config.estimator_id, built.model, theta, x0, est, stream);
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) {
        failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back(work, w);
    }
    for (auto& t : pool) {
      t.join();
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  const SampleStatistics stats = aggregate_statistics(samples);
  const auto stop = std::chrono::steady_clock::now();

  report.estimate.mean = stats.mean;
  report.estimate.standard_error = stats.standard_error;
  report.estimate.n_samples = est.n_samples;
  report.estimate.wall_time_seconds = std::chrono::duration<double>(stop - start).count();
  report.estimate.estimator_id = config.estimator_id;
  report.estimate.seed = est.seed;
  report.timestamp = utc_timestamp();
  for (std::size_t i = 0; i < stats.mean.size(); ++i) {
    const double half = 1.96 * stats.standard_error[i];
    report.rows.push_back({i, stats.mean[i], stats.standard_error[i], stats.mean[i] - half,
                           stats.mean[i] + half});
  }

  if (!config.output_path.empty()) {
    write_report(report, config.output_path, config.report_format);
  }
  return report;
}

}  // namespace gradest
