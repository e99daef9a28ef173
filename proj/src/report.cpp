#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "gradest/error.hpp"
#include "gradest/harness.hpp"

namespace gradest {
namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) {
      out += ',';
    }
    out += format_double(values[i]);
  }
  return out;
}

// Configuration echo in a fixed order. Worker count and output location are
// left out: they do not affect any number in the report.
std::vector<std::pair<std::string, std::string>> config_echo(const ExperimentReport& r) {
  const auto& c = r.config;
  const auto& e = c.estimator;
  std::vector<std::pair<std::string, std::string>> out{
      {"toolkit_version", r.toolkit_version},
      {"model", c.model_id},
      {"theta", c.theta ? join(*c.theta) : ""},
      {"x0", c.x0 ? join(*c.x0) : ""},
      {"horizon", c.horizon ? format_double(*c.horizon) : ""},
  };
  if (c.n_features) {
    out.emplace_back("n_features", std::to_string(*c.n_features));
  }
  out.insert(out.end(), {
                            {"estimator", c.estimator_id},
                            {"n_samples", std::to_string(e.n_samples)},
                            {"steps_main", std::to_string(e.steps_main)},
                            {"steps_aux", std::to_string(e.steps_aux)},
                            {"n_aux", std::to_string(e.n_aux)},
                            {"randomization", std::string(randomization_name(e.randomization))},
                            {"thinning_beta", format_double(e.thinning_beta)},
                            {"fd_step", format_double(e.fd_step)},
                            {"seed", std::to_string(e.seed)},
                            {"max_jumps", std::to_string(e.max_jumps)},
                        });
  return out;
}

std::string render_csv(const ExperimentReport& r) {
  std::ostringstream out;
  for (const auto& [key, value] : config_echo(r)) {
    out << "# " << key << ": " << value << '\n';
  }
  out << "# run.timestamp: " << r.timestamp << '\n';
  out << "# run.wall_time_seconds: " << format_double(r.estimate.wall_time_seconds) << '\n';
  out << "param_index,mean,stderr,ci_lo,ci_hi\n";
  for (const auto& row : r.rows) {
    out << row.param_index << ',' << format_double(row.mean) << ',' << format_double(row.stderr_)
        << ',' << format_double(row.ci_lo) << ',' << format_double(row.ci_hi) << '\n';
  }
  return out.str();
}

std::string render_json(const ExperimentReport& r) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  const auto& c = r.config;
  const auto& e = c.estimator;
  doc["toolkit_version"] = r.toolkit_version;
  cfg["model"] = c.model_id;
  if (c.theta) cfg["theta"] = *c.theta;
  if (c.x0) cfg["x0"] = *c.x0;
  if (c.horizon) cfg["horizon"] = *c.horizon;
  if (c.n_features) cfg["n_features"] = *c.n_features;
  cfg["estimator"] = c.estimator_id;
  cfg["n_samples"] = e.n_samples;
  cfg["steps_main"] = e.steps_main;
  cfg["steps_aux"] = e.steps_aux;
  cfg["n_aux"] = e.n_aux;
  cfg["randomization"] = randomization_name(e.randomization);
  cfg["thinning_beta"] = e.thinning_beta;
  cfg["fd_step"] = e.fd_step;
  cfg["seed"] = e.seed;
  cfg["max_jumps"] = e.max_jumps;
  doc["config"] = cfg;
  doc["estimate"] = {{"estimator_id", r.estimate.estimator_id},
                     {"seed", r.estimate.seed},
                     {"n_samples", r.estimate.n_samples},
                     {"mean", r.estimate.mean},
                     {"standard_error", r.estimate.standard_error}};
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"param_index", row.param_index},
                    {"mean", row.mean},
                    {"stderr", row.stderr_},
                    {"ci_lo", row.ci_lo},
                    {"ci_hi", row.ci_hi}});
  }
  doc["rows"] = rows;
  doc["run"] = {{"timestamp", r.timestamp}, {"wall_time_seconds", r.estimate.wall_time_seconds}};
  return doc.dump(2) + "\n";
}

}  // namespace

std::string render_report(const ExperimentReport& report, ReportFormat format) {
  return format == ReportFormat::json ? render_json(report) : render_csv(report);
}

void write_report(const ExperimentReport& report, const std::string& path, ReportFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  out << render_report(report, format);
  out.flush();
  if (!out) {
    throw IoError("failed writing '" + path + "'");
  }
}

std::string canonicalize_report(std::string_view text, ReportFormat format) {
  if (format == ReportFormat::json) {
    nlohmann::ordered_json doc;
    try {
      doc = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw InvalidArgument(std::string("report is not valid JSON: ") + e.what());
    }
    doc.erase("run");
    return doc.dump(2) + "\n";
  }
  std::string out;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.rfind("# run.", 0) == 0) {
      continue;
    }
    out.append(line);
    out += '\n';
  }
  return out;
}

}  // namespace gradest
