#pragma once

// Experiment orchestration: configuration files, estimator dispatch,
// replicate statistics, report files and the parameter-scaling benchmark.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gradest/estimator_config.hpp"
#include "gradest/models.hpp"
#include "gradest/rng.hpp"

namespace gradest {

inline constexpr std::string_view kToolkitVersion = "0.1.0";
inline constexpr std::string_view kConfigSchema = "gradest-experiment/1";

enum class ReportFormat { csv, json };

std::string_view report_format_name(ReportFormat f) noexcept;
ReportFormat parse_report_format(std::string_view name);

struct ExperimentConfig {
  std::string model_id;
  std::optional<std::vector<double>> theta;  // catalog default when empty
  std::optional<std::vector<double>> x0;
  std::optional<double> horizon;
  std::optional<std::size_t> n_features;
  std::string estimator_id;
  EstimatorConfig estimator;
  std::size_t workers = 1;
  std::string output_path;  // empty: no file written
  ReportFormat report_format = ReportFormat::csv;

  /// Throws ConfigError, UnknownModelError or UnknownEstimatorError.
  void validate() const;
};

/// Parses the flat `key = value` format. The first non-comment line must be
/// `schema = gradest-experiment/1`; unknown or repeated keys are errors.
ExperimentConfig parse_experiment_config(std::string_view text);
ExperimentConfig load_experiment_config(const std::string& path);

struct ReportRow {
  std::size_t param_index = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  GradientEstimate estimate;
  std::vector<ReportRow> rows;
  std::string toolkit_version{kToolkitVersion};
  std::string timestamp;
};

/// Runs n_samples replicates, replicate r on Stream(seed).child(r), and
/// aggregates them in replicate order, so the result does not depend on the
/// worker count. Writes the report when output_path is set.
ExperimentReport run_experiment(const ExperimentConfig& config);

std::string render_report(const ExperimentReport& report, ReportFormat format);
void write_report(const ExperimentReport& report, const std::string& path, ReportFormat format);

/// Drops the fields that legitimately differ between identical runs
/// (timestamp, wall time) so two reports can be compared byte for byte.
std::string canonicalize_report(std::string_view text, ReportFormat format);

struct SampleStatistics {
  std::vector<double> mean;
  std::vector<double> standard_error;
};

/// Two-pass mean and standard error (sample sd / sqrt(count), 0 for a single
/// sample). Every sample must have the same length; throws InvalidArgument on
/// empty input.
SampleStatistics aggregate_statistics(std::span<const std::vector<double>> samples);

/// Estimator ids: gge, pathwise, fd-sde (SDE models); eipa, girsanov, fd-crn
/// (reaction networks).
std::vector<std::string> estimator_ids();
bool estimator_is_sde(std::string_view id);

/// One replicate of `estimator_id` for every parameter. Throws
/// UnknownEstimatorError, or ConfigError when the model type does not match.
std::vector<double> run_replicate(std::string_view estimator_id, const AnyModel& model,
                                  const ParamVector& theta, std::span<const double> x0,
                                  const EstimatorConfig& config, Stream& stream);

struct ScalingRow {
  std::size_t n = 0;
  std::string estimator_id;
  double seconds = 0.0;  // median per-replicate wall time
  double ratio = 0.0;    // seconds / seconds at the smallest n
};

/// Median per-replicate time on feature-drift(n) for each (n, estimator)
/// after a warm-up, over at least `replicates` (>= 100) timed replicates.
std::vector<ScalingRow> scaling_benchmark(std::span<const std::size_t> n_values,
                                          std::span<const std::string> estimator_ids,
                                          const EstimatorConfig& base, std::size_t replicates = 100);

std::string render_scaling_table(std::span<const ScalingRow> rows);

/// Oracle and analytic sanity suite; one line per check on `out`. Returns
/// true when every check passes.
bool run_selftest(std::ostream& out);

}  // namespace gradest
