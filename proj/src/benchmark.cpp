#include <algorithm>
#include <chrono>
#include <cstdio>
#include <string>

#include "gradest/error.hpp"
#include "gradest/harness.hpp"

namespace gradest {

std::vector<ScalingRow> scaling_benchmark(std::span<const std::size_t> n_values,
                                          std::span<const std::string> estimator_ids,
                                          const EstimatorConfig& base, std::size_t replicates) {
  if (n_values.empty() || estimator_ids.empty()) {
    throw InvalidArgument("scaling benchmark needs at least one n and one estimator");
  }
  replicates = std::max<std::size_t>(replicates, 100);
  base.validate();
  for (const auto& id : estimator_ids) {
    if (!estimator_is_sde(id)) {
      throw ConfigError("scaling benchmark runs on feature-drift; '" + id +
                        "' is a reaction-network estimator");
    }
  }
  const std::size_t warmup = std::max<std::size_t>(10, replicates / 10);
  const std::size_t n_min = *std::min_element(n_values.begin(), n_values.end());

  std::vector<ScalingRow> rows;
  for (const std::size_t n : n_values) {
    BuiltinOptions opts;
    opts.n_features = n;
    const BuiltinModel built = builtin_model("feature-drift", opts);
    const ParamVector theta(built.default_theta);
    for (const auto& id : estimator_ids) {
      const Stream root(base.seed);
      std::vector<double> times;
      times.reserve(replicates);
      for (std::size_t r = 0; r < warmup + replicates; ++r) {
        Stream stream = root.child(r);
        const auto start = std::chrono::steady_clock::now();
        const auto sample = run_replicate(id, built.model, theta, built.default_x0, base, stream);
        const auto stop = std::chrono::steady_clock::now();
        if (sample.size() != n) {
          throw ModelContractError("replicate returned the wrong number of components");
        }
        if (r >= warmup) {
          times.push_back(std::chrono::duration<double>(stop - start).count());
        }
      }
      const auto mid = times.begin() + static_cast<std::ptrdiff_t>(times.size() / 2);
      std::nth_element(times.begin(), mid, times.end());
      double median = *mid;
      if (times.size() % 2 == 0) {
        median = 0.5 * (median + *std::max_element(times.begin(), mid));
      }
      rows.push_back({n, id, median, 0.0});
    }
  }
  for (auto& row : rows) {
    for (const auto& ref : rows) {
      if (ref.n == n_min && ref.estimator_id == row.estimator_id) {
        row.ratio = row.seconds / ref.seconds;
      }
    }
  }
  return rows;
}

std::string render_scaling_table(std::span<const ScalingRow> rows) {
  std::string out = "n,estimator,seconds,ratio\n";
  char buf[128];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%s,%.6e,%.4f\n", row.n, row.estimator_id.c_str(),
                  row.seconds, row.ratio);
    out += buf;
  }
  return out;
}

}  // namespace gradest
