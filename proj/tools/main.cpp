// smoothq command line: estimation, analytic variance queries, population
// solutions, experiment drivers, and price-series ingestion.
//
// Exit codes: 0 success, 2 usage error, 1 data or numeric error.
// Stdout carries data only; diagnostics go to stderr.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "smoothq/asymptotics.hpp"
#include "smoothq/config_json.hpp"
#include "smoothq/distributions.hpp"
#include "smoothq/estimators.hpp"
#include "smoothq/experiments.hpp"
#include "smoothq/model_spec.hpp"
#include "smoothq/population.hpp"
#include "smoothq/result_table.hpp"
#include "smoothq/returns.hpp"

namespace {

using namespace smoothq;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { Csv, Json };

struct Output {
  std::string path;  // empty -> stdout

  template <typename Fn>
  void write(Fn&& fn) const {
    if (path.empty()) {
      fn(std::cout);
      std::cout.flush();
      return;
    }
    std::ofstream out(path);
    if (!out) throw DataError("cannot open output file '" + path + "'");
    fn(out);
  }
};

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw UsageError("unknown format '" + name + "' (expected csv or json)");
}

/// Small ordered report of named values; strings and absent values allowed.
struct Report {
  struct Field {
    std::string key;
    std::string text;  // already formatted; numeric fields use format_double
    bool quoted = false;
  };
  std::vector<Field> fields;

  void add(const std::string& key, double value) { fields.push_back({key, format_double(value), false}); }
  void add(const std::string& key, const std::string& value) { fields.push_back({key, value, true}); }

  void write(std::ostream& os, Format format) const {
    if (format == Format::Json) {
      os << "{";
      for (std::size_t i = 0; i < fields.size(); ++i) {
        os << detail::json_string(fields[i].key) << ":"
           << (fields[i].quoted ? detail::json_string(fields[i].text) : fields[i].text);
        if (i + 1 < fields.size()) os << ",";
      }
      os << "}\n";
    } else {
      for (std::size_t i = 0; i < fields.size(); ++i)
        os << detail::csv_field(fields[i].key) << (i + 1 < fields.size() ? "," : "\n");
      for (std::size_t i = 0; i < fields.size(); ++i)
        os << detail::csv_field(fields[i].text) << (i + 1 < fields.size() ? "," : "\n");
    }
  }
};

void require_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw UsageError("--tau must lie in (0,1)");
}
void require_z(double z) {
  if (!(z > -1.0 && z < 1.0)) throw UsageError("--z must lie in (-1,1)");
}
void require_h(double h) {
  if (!(h >= 0.0)) throw UsageError("--h must be nonnegative");
}

struct CommonOutputOpts {
  std::string format = "json";
  Output output;
};

void add_output_opts(CLI::App* cmd, CommonOutputOpts* opts, const std::string& default_format) {
  opts->format = default_format;
  cmd->add_option("--format", opts->format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--output,-o", opts->output.path, "Write output to this file instead of stdout");
}

// The smoothing level flag is spelled --h, so the short help alias -h must go.
CLI::App* add_subcommand(CLI::App& app, const std::string& name, const std::string& desc) {
  CLI::App* cmd = app.add_subcommand(name, desc);
  cmd->set_help_flag("--help", "Print this help message and exit");
  return cmd;
}

// ---------------------------------------------------------------- estimate

struct EstimateOpts {
  std::string data_path;
  std::optional<double> z;
  double h = 0.0;
  std::optional<double> plugin_tau;
  bool mean_family = false;
  CommonOutputOpts out;
};

void run_estimate(const EstimateOpts& opts) {
  const Sample sample{load_values_file(opts.data_path)};
  int modes = (opts.z.has_value() ? 1 : 0) + (opts.plugin_tau.has_value() ? 1 : 0) +
              (opts.mean_family ? 1 : 0);
  if (modes != 1)
    throw UsageError("choose exactly one of --z, --plugin-tau, --mean-family");
  require_h(opts.h);
  EstimatorOutput est;
  if (opts.plugin_tau) {
    require_tau(*opts.plugin_tau);
    est = plugin_estimator(sample, *opts.plugin_tau, opts.h);
  } else if (opts.mean_family) {
    est = mean_estimator(sample, opts.h);
  } else {
    require_z(*opts.z);
    est = solve_empirical(sample, {*opts.z, opts.h});
  }
  Report report;
  report.add("q_hat", est.q_hat);
  report.add("z_used", est.z_used);
  report.add("h", est.h);
  report.add("tau_induced", est.tau_induced);
  report.add("iterations", static_cast<double>(est.iterations));
  report.add("z_out_of_range", est.z_out_of_range ? 1.0 : 0.0);
  const Format fmt = parse_format(opts.out.format);
  opts.out.output.write([&](std::ostream& os) { report.write(os, fmt); });
}

// ---------------------------------------------------------------- variance

struct VarianceOpts {
  std::string model_spec;
  std::optional<double> z;
  std::optional<double> tau;
  double h = 0.0;
  CommonOutputOpts out;
};

void run_variance(const VarianceOpts& opts) {
  const DistributionModel model = parse_model_spec(opts.model_spec);
  require_h(opts.h);
  if (opts.z.has_value() == opts.tau.has_value())
    throw UsageError("choose exactly one of --z (fixed-parameter report) or --tau (line report)");
  Report report;
  if (opts.z) {
    require_z(*opts.z);
    const VarianceReport rep = asym_variance(model, {*opts.z, opts.h});
    report.add("z", *opts.z);
    report.add("h", opts.h);
    report.add("q", rep.q);
    report.add("tau", rep.tau);
    report.add("score_var", rep.score_var);
    report.add("slope", rep.slope);
    report.add("asym_var", rep.asym_var);
    report.add("classical_var", rep.classical_var);
    report.add("ratio", rep.ratio);
  } else {
    require_tau(*opts.tau);
    const LineCoefficients k = line_coefficients(model, *opts.tau);
    const HStarRegime regime = classify_hstar(model, *opts.tau);
    report.add("tau", *opts.tau);
    report.add("h", opts.h);
    report.add("line_variance", line_variance(model, *opts.tau, opts.h));
    report.add("a", k.a);
    report.add("b", k.b);
    report.add("c", k.c);
    report.add("d", k.d);
    report.add("plugin_variance", plugin_variance(model, *opts.tau));
    report.add("mean_family_variance", mean_family_variance(model));
    switch (regime.trend) {
      case VarianceTrend::MinAtZero: report.add("trend", std::string("min_at_zero")); break;
      case VarianceTrend::MinAtInfinity: report.add("trend", std::string("min_at_infinity")); break;
      case VarianceTrend::InteriorMinimum: report.add("trend", std::string("interior_minimum")); break;
    }
    if (regime.h_star) report.add("h_star", *regime.h_star);
    report.add("boundary_flag", regime.boundary_flag ? 1.0 : 0.0);
  }
  const Format fmt = parse_format(opts.out.format);
  opts.out.output.write([&](std::ostream& os) { report.write(os, fmt); });
}

// -------------------------------------------------------------- population

struct PopulationOpts {
  std::string model_spec;
  double z = 0.0;
  double h = 0.0;
  CommonOutputOpts out;
};

void run_population(const PopulationOpts& opts) {
  const DistributionModel model = parse_model_spec(opts.model_spec);
  require_z(opts.z);
  require_h(opts.h);
  const SmoothParams params{opts.z, opts.h};
  const PopulationSolution sol = solve_population(model, params);
  Report report;
  report.add("z", opts.z);
  report.add("h", opts.h);
  report.add("q", sol.q);
  report.add("tau", sol.tau);
  report.add("score_slope", sol.score_slope);
  report.add("dq_dh", dq_dh(model, params));
  report.add("dq_dz", dq_dz(model, params));
  report.add("zm", zm(model));
  const Format fmt = parse_format(opts.out.format);
  opts.out.output.write([&](std::ostream& os) { report.write(os, fmt); });
}

// -------------------------------------------------------------- experiment

struct ExperimentOpts {
  std::string which;
  std::string config_path;
  std::optional<std::string> model_spec;
  std::optional<std::size_t> n;
  std::optional<std::size_t> replications;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<double> fixed_z;
  std::optional<std::string> prices;
  CommonOutputOpts out;
};

void run_experiment(const ExperimentOpts& opts) {
  ExperimentConfig cfg;
  if (!opts.config_path.empty()) cfg = load_config_file(opts.config_path);
  if (opts.model_spec) cfg.mc.model = parse_model_spec(*opts.model_spec);
  if (opts.n) cfg.mc.n = *opts.n;
  if (opts.replications) cfg.mc.replications = *opts.replications;
  if (opts.seed) {
    cfg.mc.master_seed = *opts.seed;
    cfg.has_seed = true;
  }
  if (opts.workers) cfg.mc.workers = *opts.workers;
  if (opts.fixed_z) cfg.mc.fixed_z = *opts.fixed_z;
  if (opts.prices) cfg.prices_csv = *opts.prices;

  const bool needs_seed =
      opts.which == "2f" || opts.which == "3" || opts.which == "mono";
  if (needs_seed && !cfg.has_seed)
    throw UsageError("experiment " + opts.which +
                     " samples data: give --seed or master_seed in the config "
                     "(seeds are never implicit)");

  ExperimentResult result;
  if (opts.which == "1") {
    result = experiment1(cfg.mc);
  } else if (opts.which == "2") {
    result = experiment2(cfg.mc);
  } else if (opts.which == "2f") {
    result = experiment2_finite(cfg.mc);
  } else if (opts.which == "3") {
    result = experiment3(cfg.mc);
  } else if (opts.which == "mono") {
    result = experiment_monotonicity(cfg.mc);
  } else if (opts.which == "realdata") {
    if (cfg.prices_csv.empty())
      throw UsageError("experiment realdata needs --prices or prices_csv in the config");
    result = experiment_realdata(load_returns_file(cfg.prices_csv), cfg.mc.z_values,
                                 cfg.mc.h_grid);
  } else {
    throw UsageError("unknown experiment '" + opts.which + "'");
  }

  const Format fmt = parse_format(opts.out.format);
  opts.out.output.write([&](std::ostream& os) {
    if (fmt == Format::Csv) result.write_csv(os); else result.write_json(os);
  });
}

// ------------------------------------------------------------------ ingest

struct IngestOpts {
  std::string prices_path;
  Output output;
};

void run_ingest(const IngestOpts& opts) {
  const ReturnsSeries series = load_returns_file(opts.prices_path);
  opts.output.write([&](std::ostream& os) {
    os << "date,close,log_return\n";
    for (std::size_t i = 0; i < series.prices.size(); ++i) {
      os << series.dates[i] << ',' << format_double(series.prices[i]) << ',';
      if (i > 0) os << format_double(series.returns[i - 1]);
      os << '\n';
    }
  });
  std::cerr << "ingested " << series.prices.size() << " prices ("
            << series.filled_count << " filled), " << series.returns.size()
            << " returns\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smoothed quantile estimation: a two-parameter family interpolating "
               "between sample quantiles and the sample mean, with closed-form "
               "asymptotic variances and Monte Carlo experiment drivers."};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");

  EstimateOpts estimate;
  auto* cmd_est = add_subcommand(app, "estimate", "Solve the empirical score on a data file");
  cmd_est->add_option("--data", estimate.data_path, "CSV/text file with one observation per line")
      ->required();
  cmd_est->add_option("--z", estimate.z, "Fixed asymmetry parameter in (-1,1)");
  cmd_est->add_option("--h", estimate.h, "Smoothing level (>= 0)")->capture_default_str();
  cmd_est->add_option("--plugin-tau", estimate.plugin_tau,
                      "Target quantile level for the plug-in estimator");
  cmd_est->add_flag("--mean-family", estimate.mean_family,
                    "Use the mean-estimating family (data-driven z)");
  add_output_opts(cmd_est, &estimate.out, "json");

  VarianceOpts variance;
  auto* cmd_var = add_subcommand(app, "variance", "Asymptotic variance reports");
  cmd_var->add_option("--model", variance.model_spec,
                      "Model spec: normal:<loc>,<scale> | laplace:<loc>,<scale>")
      ->required();
  cmd_var->add_option("--z", variance.z, "Fixed-parameter report at this z");
  cmd_var->add_option("--tau", variance.tau, "Constant-quantile-line report at this level");
  cmd_var->add_option("--h", variance.h, "Smoothing level (>= 0)")->capture_default_str();
  add_output_opts(cmd_var, &variance.out, "json");

  PopulationOpts population;
  auto* cmd_pop = add_subcommand(app, "population", "Population solution and derivatives");
  cmd_pop->add_option("--model", population.model_spec, "Analytic model spec")->required();
  cmd_pop->add_option("--z", population.z, "Asymmetry parameter in (-1,1)")->required();
  cmd_pop->add_option("--h", population.h, "Smoothing level (>= 0)")->capture_default_str();
  add_output_opts(cmd_pop, &population.out, "json");

  ExperimentOpts experiment;
  auto* cmd_exp = add_subcommand(app, "experiment", "Run an experiment driver");
  cmd_exp->add_option("which", experiment.which, "One of: 1, 2, 2f, 3, mono, realdata")
      ->required()
      ->check(CLI::IsMember({"1", "2", "2f", "3", "mono", "realdata"}));
  cmd_exp->add_option("--config", experiment.config_path, "JSON config file");
  cmd_exp->add_option("--model", experiment.model_spec, "Override: model spec");
  cmd_exp->add_option("--n", experiment.n, "Override: sample size");
  cmd_exp->add_option("--reps", experiment.replications, "Override: replication count");
  cmd_exp->add_option("--seed", experiment.seed, "Override: master seed");
  cmd_exp->add_option("--workers", experiment.workers,
                      "Worker threads (default: available parallelism; any count "
                      "yields identical output)");
  cmd_exp->add_option("--fixed-z", experiment.fixed_z, "Override: fixed-z comparator");
  cmd_exp->add_option("--prices", experiment.prices, "Override: prices CSV for realdata");
  add_output_opts(cmd_exp, &experiment.out, "csv");

  IngestOpts ingest;
  auto* cmd_ing = add_subcommand(app, "ingest", "Clean a price CSV and print log returns");
  cmd_ing->add_option("--prices", ingest.prices_path, "CSV with date and close columns")
      ->required();
  cmd_ing->add_option("--output,-o", ingest.output.path, "Write output to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "run with --help for usage\n";
    return 2;
  }

  try {
    if (cmd_est->parsed()) run_estimate(estimate);
    else if (cmd_var->parsed()) run_variance(variance);
    else if (cmd_pop->parsed()) run_population(population);
    else if (cmd_exp->parsed()) run_experiment(experiment);
    else if (cmd_ing->parsed()) run_ingest(ingest);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
