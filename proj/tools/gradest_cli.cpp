// Command-line front end: estimate, verify-adjoint, benchmark-scaling,
// selftest. Exit status is 0 on success and the error category code
// otherwise.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gradest/error.hpp"
#include "gradest/harness.hpp"
#include "gradest/oracle.hpp"

namespace {

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) {
        throw std::invalid_argument(item);
      }
    } catch (const std::exception&) {
      throw gradest::ConfigError("not a number: '" + item + "'");
    }
  }
  return out;
}

int run_estimate(const std::string& config_path) {
  const auto config = gradest::load_experiment_config(config_path);
  const auto report = gradest::run_experiment(config);
  if (config.output_path.empty()) {
    std::cout << gradest::render_report(report, config.report_format);
  } else {
    std::cerr << "wrote " << config.output_path << '\n';
  }
  return 0;
}

struct AdjointArgs {
  std::string model_id;
  std::size_t param = 0;
  std::size_t nx = 401;
  std::size_t nt = 401;
  std::optional<double> x_min;
  std::optional<double> x_max;
  double fd_step = 1e-4;
  std::string theta;
  std::optional<double> x0;
  std::optional<double> horizon;
  std::string output;
};

int run_verify_adjoint(const AdjointArgs& args) {
  gradest::BuiltinOptions opts;
  opts.horizon = args.horizon;
  const auto built = gradest::builtin_model(args.model_id, opts);
  if (!gradest::is_sde(built.model)) {
    throw gradest::ConfigError("verify-adjoint needs a diffusion model");
  }
  const auto& model = *std::get<std::shared_ptr<const gradest::SdeModel>>(built.model);
  const gradest::ParamVector theta(args.theta.empty() ? built.default_theta
                                                      : parse_doubles(args.theta));
  const double x0 = args.x0.value_or(built.default_x0.at(0));
  gradest::SpaceTimeGrid grid = gradest::default_pde_grid(model, theta, x0, args.nx, args.nt);
  if (args.x_min || args.x_max) {
    grid = gradest::SpaceTimeGrid(args.x_min.value_or(grid.x_min),
                                  args.x_max.value_or(grid.x_max), args.nx, args.nt);
  }
  const auto rep = gradest::check_adjoint_identity(model, theta, args.param, x0, grid, args.fd_step);
  nlohmann::ordered_json doc = {
      {"model", args.model_id},
      {"param_index", rep.param_index},
      {"theta", std::vector<double>(theta.values().begin(), theta.values().end())},
      {"x0", x0},
      {"grid", {{"x_min", grid.x_min}, {"x_max", grid.x_max}, {"nx", grid.nx}, {"nt", grid.nt}}},
      {"fd_step", args.fd_step},
      {"lhs", rep.lhs},
      {"rhs_terms", {rep.rhs_terms[0], rep.rhs_terms[1], rep.rhs_terms[2]}},
      {"rhs", rep.rhs},
      {"abs_gap", rep.abs_gap},
  };
  const std::string text = doc.dump(2) + "\n";
  if (args.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(args.output, std::ios::binary | std::ios::trunc);
    if (!(out << text)) {
      throw gradest::IoError("cannot write '" + args.output + "'");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo parameter-gradient estimation for SDEs and reaction networks"};
  app.require_subcommand(1);

  std::string config_path;
  auto* estimate = app.add_subcommand("estimate", "Run an experiment config");
  estimate->add_option("--config", config_path, "Experiment config file")->required();

  AdjointArgs adj;
  auto* verify = app.add_subcommand("verify-adjoint", "Check the adjoint identity on a grid");
  verify->add_option("--model", adj.model_id, "Diffusion model id")->required();
  verify->add_option("--param", adj.param, "Parameter index")->required();
  verify->add_option("--nx", adj.nx, "Space nodes");
  verify->add_option("--nt", adj.nt, "Time nodes");
  verify->add_option("--x-min", adj.x_min, "Domain lower bound");
  verify->add_option("--x-max", adj.x_max, "Domain upper bound");
  verify->add_option("--fd-step", adj.fd_step, "Central-difference step in theta");
  verify->add_option("--theta", adj.theta, "Comma-separated parameters");
  verify->add_option("--x0", adj.x0, "Initial point");
  verify->add_option("--horizon", adj.horizon, "Time horizon");
  verify->add_option("--output", adj.output, "JSON output file");

  std::string n_list = "1,8,64";
  std::string estimators = "gge,pathwise";
  std::size_t replicates = 100;
  gradest::EstimatorConfig bench_cfg;
  auto* bench = app.add_subcommand("benchmark-scaling", "Per-replicate cost against n");
  bench->add_option("--n", n_list, "Comma-separated feature counts");
  bench->add_option("--estimators", estimators, "Comma-separated estimator ids");
  bench->add_option("--replicates", replicates, "Timed replicates per cell (at least 100)");
  bench->add_option("--seed", bench_cfg.seed, "Seed");

  auto* selftest = app.add_subcommand("selftest", "Oracle and analytic checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(gradest::ErrorCategory::config);
  }

  try {
    if (*estimate) {
      return run_estimate(config_path);
    }
    if (*verify) {
      return run_verify_adjoint(adj);
    }
    if (*bench) {
      std::vector<std::size_t> ns;
      for (const auto& item : split(n_list)) {
        ns.push_back(static_cast<std::size_t>(std::stoul(item)));
      }
      const auto ids = split(estimators);
      const auto rows = gradest::scaling_benchmark(ns, ids, bench_cfg, replicates);
      std::cout << gradest::render_scaling_table(rows);
      return 0;
    }
    if (*selftest) {
      return gradest::run_selftest(std::cout) ? 0 : 1;
    }
  } catch (const gradest::Error& e) {
    std::cerr << "error [" << gradest::category_name(e.category()) << "]: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
