// delayhedge: optimal exponential-utility hedging under information delay.
//
// Subcommands: decompose, value, strategy, sweep, simulate. Exit codes:
// 0 success, 2 usage/validation error, 3 numerical failure, 4 verification
// failure. Diagnostics go to stderr; DELAYHEDGE_LOG=info|debug raises
// verbosity.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "delayhedge/decomposition.hpp"
#include "delayhedge/hedging.hpp"
#include "delayhedge/log.hpp"
#include "delayhedge/mc_oracle.hpp"
#include "delayhedge/models.hpp"
#include "delayhedge/svg_plot.hpp"
#include "delayhedge/sweep.hpp"
#include "delayhedge/text_io.hpp"

namespace dh = delayhedge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerification = 4;

struct ModelOptions {
  std::string family;
  double rho = 0.0;
  bool rho_set = false;
  double hurst = 0.0;
  bool hurst_set = false;
  int n = 0;
  double dt = 0.0;  // <= 0 selects the fbm default 1/n
  std::string mu = "0";
  std::string file;
  bool allow_any_rho = false;
};

void add_model_flags(CLI::App* cmd, ModelOptions& opt) {
  cmd->add_option("--family", opt.family,
                  "Model family: kms, fbm or file (inferred from --rho, "
                  "--hurst or --file when omitted)")
      ->check(CLI::IsMember({"kms", "fbm", "file"}));
  cmd->add_option("--rho", opt.rho, "KMS correlation parameter in (0,1)")
      ->each([&opt](const std::string&) { opt.rho_set = true; });
  cmd->add_option("--hurst", opt.hurst, "fBm Hurst parameter in (0,1)")
      ->each([&opt](const std::string&) { opt.hurst_set = true; });
  cmd->add_option("--n", opt.n, "Number of trading periods");
  cmd->add_option("--dt", opt.dt, "fBm grid spacing (default 1/n)");
  cmd->add_option("--mu", opt.mu,
                  "Increment mean: a scalar broadcast to all periods, or a "
                  "path to a file of n reals (default 0)");
  cmd->add_option("--file", opt.file, "Model file (implies --family file)");
  cmd->add_flag("--allow-any-rho", opt.allow_any_rho,
                "Admit any |rho| < 1 subject to positive definiteness");
}

dh::Vector<double> resolve_mu(const std::string& spec, long n) {
  double scalar;
  const auto res =
      std::from_chars(spec.data(), spec.data() + spec.size(), scalar);
  if (res.ec == std::errc() && res.ptr == spec.data() + spec.size()) {
    return dh::Vector<double>::Constant(n, scalar);
  }
  const std::vector<double> values = dh::parse_reals_file(spec);
  if (static_cast<long>(values.size()) != n) {
    throw dh::DimensionMismatch("mu file must hold exactly n = " +
                                std::to_string(n) + " reals, found " +
                                std::to_string(values.size()));
  }
  dh::Vector<double> mu(n);
  for (long i = 0; i < n; ++i) mu(i) = values[static_cast<std::size_t>(i)];
  return mu;
}

dh::MarketModel<double> build_model(const ModelOptions& opt) {
  std::string family = opt.family;
  if (family.empty()) {
    if (!opt.file.empty()) {
      family = "file";
    } else if (opt.rho_set && !opt.hurst_set) {
      family = "kms";
    } else if (opt.hurst_set && !opt.rho_set) {
      family = "fbm";
    } else {
      throw dh::InvalidParameter(
          "cannot infer model family; pass --family, --rho, --hurst or "
          "--file");
    }
  }
  if (family == "file") {
    if (opt.file.empty()) {
      throw dh::InvalidParameter("--family file requires --file");
    }
    return dh::load_model(opt.file);
  }
  if (opt.n < 1) {
    throw dh::InvalidParameter("--n is required and must be >= 1");
  }
  const dh::Vector<double> mu = resolve_mu(opt.mu, opt.n);
  if (family == "kms") {
    if (!opt.rho_set) throw dh::InvalidParameter("kms requires --rho");
    return dh::kms_model(opt.rho, opt.n, mu, opt.allow_any_rho);
  }
  if (!opt.hurst_set) throw dh::InvalidParameter("fbm requires --hurst");
  const double dt = opt.dt > 0.0 ? opt.dt : 1.0 / opt.n;
  return dh::fbm_model(dh::FbmSpec<double>{opt.hurst, opt.n, dt}, mu);
}

bool is_usage_error(const std::exception& e) {
  return dynamic_cast<const dh::InvalidParameter*>(&e) != nullptr ||
         dynamic_cast<const dh::InvalidRange*>(&e) != nullptr ||
         dynamic_cast<const dh::DimensionMismatch*>(&e) != nullptr ||
         dynamic_cast<const dh::ParseError*>(&e) != nullptr;
}

/// Builds the model (validation phase, exit 2 on any failure) and runs the
/// computation (exit 2 only for precondition errors, 3 for numerical ones).
template <typename Fn>
int with_model(const ModelOptions& opt, Fn&& fn) {
  std::optional<dh::MarketModel<double>> model;
  try {
    model.emplace(build_model(opt));
  } catch (const std::exception& e) {
    std::cerr << "delayhedge: " << e.what() << std::endl;
    return kExitUsage;
  }
  try {
    return fn(*model);
  } catch (const std::exception& e) {
    std::cerr << "delayhedge: " << e.what() << std::endl;
    return is_usage_error(e) ? kExitUsage : kExitNumerical;
  }
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw dh::Error("cannot open output file: " + path);
  return file;
}

int cmd_decompose(const ModelOptions& opt, int delay,
                  const std::string& output) {
  return with_model(opt, [&](const dh::MarketModel<double>& model) {
    const dh::SymMatrix<double> theta(dh::invert_pd(model.sigma));
    const auto dec = dh::decompose(theta, delay);
    std::ofstream file;
    std::ostream& out = open_output(file, output);
    dh::write_matrix_block(out, "R", dec.r.mat());
    dh::write_matrix_block(out, "Gamma", dec.gamma.mat());
    dh::write_scalar_block(out, "q_logdet", dec.q_logdet);
    return kExitOk;
  });
}

int cmd_value(const ModelOptions& opt, int delay) {
  return with_model(opt, [&](const dh::MarketModel<double>& model) {
    const dh::SymMatrix<double> theta(dh::invert_pd(model.sigma));
    const auto dec = dh::decompose(theta, delay);
    const auto report = dh::optimal_value(model, dec);
    std::cout << dh::format_double(report.value) << ","
              << dh::format_double(report.c_constant) << ","
              << dh::format_double(report.logdet_sigma) << ","
              << dh::format_double(report.logdet_q) << ","
              << dh::format_double(report.quad_term) << "\n";
    return kExitOk;
  });
}

int cmd_strategy(const ModelOptions& opt, int delay, double alpha,
                 const std::string& output) {
  return with_model(opt, [&](const dh::MarketModel<double>& model) {
    if (!(alpha > 0.0)) {
      throw dh::InvalidParameter("--alpha must be positive");
    }
    const dh::SymMatrix<double> theta(dh::invert_pd(model.sigma));
    const auto dec = dh::decompose(theta, delay);
    auto strat = dh::optimal_strategy(model, dec);
    // Risk aversion alpha is absorbed by scaling the alpha = 1 optimizer:
    // gamma-hat / alpha attains the alpha = 1 value under -exp(-alpha x).
    strat.intercept /= alpha;
    strat.loading /= alpha;
    std::ofstream file;
    std::ostream& out = open_output(file, output);
    dh::write_matrix_block(out, "intercept", strat.intercept);
    dh::write_matrix_block(out, "loading", strat.loading);
    return kExitOk;
  });
}

int cmd_sweep(const dh::SweepSpec& spec, const std::string& output, bool plot) {
  std::vector<dh::SweepRow> rows;
  try {
    rows = dh::run_sweep(spec);
  } catch (const std::exception& e) {
    std::cerr << "delayhedge: " << e.what() << std::endl;
    return is_usage_error(e) ? kExitUsage : kExitNumerical;
  }

  const double dt_column =
      spec.family == dh::ModelFamily::fbm
          ? (spec.dt > 0.0 ? spec.dt : 1.0 / spec.n)
          : 1.0;
  try {
    std::ofstream file;
    std::ostream& out = open_output(file, output);
    out << "family,param,n,dt,delay,value,logdet_sigma,logdet_q\n";
    for (const auto& row : rows) {
      out << dh::family_name(spec.family) << ","
          << dh::format_double(row.param) << "," << spec.n << ","
          << dh::format_double(dt_column) << "," << row.delay << ","
          << dh::format_double(row.value) << ","
          << dh::format_double(row.logdet_sigma) << ","
          << dh::format_double(row.logdet_q) << "\n";
    }

    if (plot) {
      std::filesystem::path plot_path =
          output.empty() ? std::filesystem::path("sweep.svg")
                         : std::filesystem::path(output).replace_extension(
                               ".svg");
      std::vector<dh::PlotSeries> series;
      std::vector<int> delays = spec.delays;
      std::sort(delays.begin(), delays.end());
      for (int d : delays) {
        dh::PlotSeries s;
        s.label = "D = " + std::to_string(d);
        for (const auto& row : rows) {
          if (row.delay == d) s.points.emplace_back(row.param, row.value);
        }
        series.push_back(std::move(s));
      }
      const std::string x_label =
          spec.family == dh::ModelFamily::kms ? "rho" : "Hurst";
      dh::write_svg_line_plot(plot_path.string(),
                              "Optimal value, n = " + std::to_string(spec.n),
                              x_label, "value", series);
      dh::log_info("wrote plot ", plot_path.string());
    }
  } catch (const std::exception& e) {
    std::cerr << "delayhedge: " << e.what() << std::endl;
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_simulate(const ModelOptions& opt, int delay, long paths,
                 std::uint64_t seed) {
  if (paths < 1) {
    std::cerr << "delayhedge: --paths must be >= 1" << std::endl;
    return kExitUsage;
  }
  return with_model(opt, [&](const dh::MarketModel<double>& model) {
    const auto start = std::chrono::steady_clock::now();
    const dh::SymMatrix<double> theta(dh::invert_pd(model.sigma));
    const auto dec = dh::decompose(theta, delay);
    const auto report = dh::optimal_value(model, dec);
    const auto strat = dh::optimal_strategy(model, dec);

    const auto batch = dh::simulate(model, paths, seed);
    const auto mc = dh::mc_expected_utility(batch, strat);
    const dh::Vector<double> weights = dh::qhat_weights(batch, model, dec);
    const double stat = dh::delayed_martingale_check(batch, weights, delay);

    dh::detail::KahanSum<double> wsum;
    for (dh::Index p = 0; p < weights.size(); ++p) wsum.add(weights(p));
    const double weight_mean = wsum.total() / static_cast<double>(paths);

    std::cout << dh::format_double(report.value) << ","
              << dh::format_double(mc.estimate) << ","
              << dh::format_double(mc.std_error) << ","
              << dh::format_double(stat) << ","
              << dh::format_double(weight_mean) << "\n";

    const auto elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    dh::log_info("simulate: ", paths, " paths in ", elapsed, " s");

    if (std::abs(mc.estimate - report.value) > 3.0 * mc.std_error) {
      std::cerr << "delayhedge: MC estimate " << mc.estimate
                << " deviates from analytic value " << report.value
                << " by more than 3 standard errors (" << mc.std_error << ")"
                << std::endl;
      return kExitVerification;
    }
    return kExitOk;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "delayhedge: optimal exponential-utility trading under information "
      "delay via the banded decomposition of the precision matrix"};
  app.require_subcommand(1);

  ModelOptions dec_opt;
  int dec_delay = 0;
  std::string dec_output;
  CLI::App* dec_cmd = app.add_subcommand(
      "decompose", "Compute the splitting Theta = R + Gamma and log|Qhat|");
  add_model_flags(dec_cmd, dec_opt);
  dec_cmd->add_option("--delay", dec_delay, "Information delay D in [0, n-1]")
      ->required();
  dec_cmd->add_option("--output", dec_output,
                      "Output file (default: standard output)");

  ModelOptions val_opt;
  int val_delay = 0;
  CLI::App* val_cmd = app.add_subcommand(
      "value",
      "Print one CSV row: value,c_constant,logdet_sigma,logdet_q,quad_term");
  add_model_flags(val_cmd, val_opt);
  val_cmd->add_option("--delay", val_delay, "Information delay D in [0, n-1]")
      ->required();

  ModelOptions str_opt;
  int str_delay = 0;
  double str_alpha = 1.0;
  std::string str_output;
  CLI::App* str_cmd = app.add_subcommand(
      "strategy", "Print the optimal strategy intercept and loading matrix");
  add_model_flags(str_cmd, str_opt);
  str_cmd->add_option("--delay", str_delay, "Information delay D in [0, n-1]")
      ->required();
  str_cmd->add_option(
      "--alpha", str_alpha,
      "Risk aversion; the reported strategy is the alpha = 1 optimizer "
      "scaled by 1/alpha, which attains the alpha = 1 value under "
      "-exp(-alpha x)");
  str_cmd->add_option("--output", str_output,
                      "Output file (default: standard output)");

  dh::SweepSpec sweep_spec;
  std::string sweep_family = "kms";
  std::string sweep_output;
  bool sweep_plot = false;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "Evaluate the optimal value over a parameter grid, write CSV");
  sweep_cmd
      ->add_option("--family", sweep_family, "Model family: kms or fbm")
      ->check(CLI::IsMember({"kms", "fbm"}));
  sweep_cmd->add_option("--param-min", sweep_spec.param_min,
                        "Grid start (rho or Hurst)")
      ->required();
  sweep_cmd->add_option("--param-max", sweep_spec.param_max, "Grid end")
      ->required();
  sweep_cmd->add_option("--param-step", sweep_spec.param_step, "Grid step")
      ->required();
  sweep_cmd->add_option("--n", sweep_spec.n, "Number of trading periods")
      ->required();
  sweep_cmd->add_option("--dt", sweep_spec.dt,
                        "fBm grid spacing (default 1/n)");
  sweep_cmd
      ->add_option("--delays", sweep_spec.delays,
                   "Comma-separated delays, e.g. 0,1,2")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--jobs", sweep_spec.jobs,
                        "Worker threads (default 1); output is identical "
                        "for any job count");
  sweep_cmd->add_option("--output", sweep_output,
                        "CSV output file (default: standard output)");
  sweep_cmd->add_flag("--plot", sweep_plot,
                      "Also write an SVG line plot next to the CSV");

  ModelOptions sim_opt;
  int sim_delay = 0;
  long sim_paths = 0;
  std::uint64_t sim_seed = 1;
  CLI::App* sim_cmd = app.add_subcommand(
      "simulate",
      "Monte Carlo verification; prints one CSV row: analytic,estimate,"
      "std_error,martingale_stat,weight_mean");
  add_model_flags(sim_cmd, sim_opt);
  sim_cmd->add_option("--delay", sim_delay, "Information delay D in [0, n-1]")
      ->required();
  sim_cmd->add_option("--paths", sim_paths, "Number of simulated paths")
      ->required();
  sim_cmd->add_option("--seed", sim_seed, "RNG seed (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (dec_cmd->parsed()) return cmd_decompose(dec_opt, dec_delay, dec_output);
  if (val_cmd->parsed()) return cmd_value(val_opt, val_delay);
  if (str_cmd->parsed()) {
    return cmd_strategy(str_opt, str_delay, str_alpha, str_output);
  }
  if (sweep_cmd->parsed()) {
    sweep_spec.family = sweep_family == "kms" ? dh::ModelFamily::kms
                                              : dh::ModelFamily::fbm;
    return cmd_sweep(sweep_spec, sweep_output, sweep_plot);
  }
  if (sim_cmd->parsed()) {
    return cmd_simulate(sim_opt, sim_delay, sim_paths, sim_seed);
  }
  return kExitUsage;
}
