#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "gradest/error.hpp"
#include "gradest/harness.hpp"

namespace gradest {

std::string_view report_format_name(ReportFormat f) noexcept {
  return f == ReportFormat::json ? "json" : "csv";
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") {
    return ReportFormat::csv;
  }
  if (name == "json") {
    return ReportFormat::json;
  }
  throw ConfigError("report_format must be csv or json, got '" + std::string(name) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(text) + "'");
  }
  return value;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    // Accept integral values written in floating notation, e.g. 1e4.
    const double d = parse_double(key, text);
    if (d < 0.0 || d != std::floor(d) || d > 1.8e19) {
      throw ConfigError(std::string(key) + ": expected a nonnegative integer, got '" +
                        std::string(text) + "'");
    }
    return static_cast<std::uint64_t>(d);
  }
  return value;
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    if (item.empty()) {
      throw ConfigError(std::string(key) + ": empty list entry");
    }
    out.push_back(parse_double(key, item));
    if (comma == std::string_view::npos) {
      break;
    }
    text.remove_prefix(comma + 1);
  }
  if (out.empty()) {
    throw ConfigError(std::string(key) + ": empty list");
  }
  return out;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view text) {
  ExperimentConfig cfg;
  std::set<std::string, std::less<>> seen;
  bool schema_seen = false;
  std::size_t line_no = 0;

  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" +
                        std::string(key) + "'");
    }
    if (!schema_seen) {
      if (key != "schema") {
        throw ConfigError("first entry must be 'schema = " + std::string(kConfigSchema) + "'");
      }
      if (value != kConfigSchema) {
        throw ConfigError("unsupported schema '" + std::string(value) + "'");
      }
      schema_seen = true;
      continue;
    }

    auto& est = cfg.estimator;
    if (key == "model") {
      cfg.model_id = value;
    } else if (key == "theta") {
      cfg.theta = parse_list(key, value);
    } else if (key == "x0") {
      cfg.x0 = parse_list(key, value);
    } else if (key == "horizon") {
      cfg.horizon = parse_double(key, value);
    } else if (key == "n_features") {
      cfg.n_features = parse_unsigned(key, value);
    } else if (key == "estimator") {
      cfg.estimator_id = value;
    } else if (key == "n_samples") {
      est.n_samples = parse_unsigned(key, value);
    } else if (key == "steps_main") {
      est.steps_main = parse_unsigned(key, value);
    } else if (key == "steps_aux") {
      est.steps_aux = parse_unsigned(key, value);
    } else if (key == "n_aux") {
      est.n_aux = parse_unsigned(key, value);
    } else if (key == "randomization") {
      est.randomization = parse_randomization(value);
    } else if (key == "thinning_beta") {
      est.thinning_beta = parse_double(key, value);
    } else if (key == "fd_step") {
      est.fd_step = parse_double(key, value);
    } else if (key == "seed") {
      est.seed = parse_unsigned(key, value);
    } else if (key == "max_jumps") {
      est.max_jumps = parse_unsigned(key, value);
    } else if (key == "workers") {
      cfg.workers = parse_unsigned(key, value);
    } else if (key == "output_path") {
      cfg.output_path = value;
    } else if (key == "report_format") {
      cfg.report_format = parse_report_format(value);
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" +
                        std::string(key) + "'");
    }
  }
  if (!schema_seen) {
    throw ConfigError("missing 'schema = " + std::string(kConfigSchema) + "'");
  }
  if (cfg.model_id.empty()) {
    throw ConfigError("missing required key 'model'");
  }
  if (cfg.estimator_id.empty()) {
    throw ConfigError("missing required key 'estimator'");
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open config file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

void ExperimentConfig::validate() const {
  estimator.validate();
  if (workers < 1) {
    throw ConfigError("workers must be at least 1");
  }
  const auto ids = estimator_ids();
  if (std::find(ids.begin(), ids.end(), estimator_id) == ids.end()) {
    throw UnknownEstimatorError(estimator_id);
  }
  if (horizon && !(*horizon > 0.0)) {
    throw ConfigError("horizon must be positive");
  }
  BuiltinOptions opts;
  opts.horizon = horizon;
  opts.n_features = n_features;
  const BuiltinModel built = builtin_model(model_id, opts);
  const bool sde = is_sde(built.model);
  if (sde != estimator_is_sde(estimator_id)) {
    throw ConfigError("estimator '" + estimator_id + "' does not apply to model '" + model_id +
                      "'");
  }
  if (theta && theta->size() != built.default_theta.size()) {
    throw ConfigError("theta needs " + std::to_string(built.default_theta.size()) +
                      " entries for model '" + model_id + "'");
  }
  if (x0) {
    if (x0->size() != built.default_x0.size()) {
      throw ConfigError("x0 needs " + std::to_string(built.default_x0.size()) +
                        " entries for model '" + model_id + "'");
    }
    if (!sde) {
      for (const double v : *x0) {
        if (v < 0.0 || v != std::floor(v)) {
          throw ConfigError("x0 of a reaction network must be nonnegative integers");
        }
      }
    }
  }
}

}  // namespace gradest
