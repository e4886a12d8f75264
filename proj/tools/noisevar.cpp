#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "noisevar/cli.hpp"

namespace {

using noisevar::cli::EstimatorChoice;
using noisevar::cli::RunConfig;

void add_input_flags(CLI::App* cmd, RunConfig& run) {
  cmd->add_option("--input", run.input, "CSV with a 'y' column (optional 'x', 't', 'r_true')");
  cmd->add_option("--scenario", run.scenario, "scenario file to simulate instead of --input");
  cmd->add_option("--seed", run.seed, "override the scenario seed");
}

void add_estimator_flags(CLI::App* cmd, RunConfig& run) {
  cmd->add_option("--gain", run.gain, "predictor gain K in (0, 1)")->capture_default_str();
  cmd->add_option("--window", run.window, "window length m")->capture_default_str();
  cmd->add_option("--mad-scale", run.mad_scale, "MAD scale a")->capture_default_str();
  cmd->add_option("--lags", run.lags, "max autocovariance lag for the baselines")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measurement-noise variance estimation from predictor innovations"};
  app.require_subcommand(1);

  RunConfig run;
  const std::map<std::string, EstimatorChoice> estimators{
      {"alg1-mad", EstimatorChoice::Alg1Mad}, {"alg1-mean", EstimatorChoice::Alg1Mean},
      {"mehra", EstimatorChoice::Mehra},      {"als", EstimatorChoice::Als},
      {"all", EstimatorChoice::All}};

  auto* simulate = app.add_subcommand("simulate", "generate a synthetic scenario as CSV");
  simulate->add_option("--scenario", run.scenario,
                       "scenario file (default: built-in reproduction scenario)");
  simulate->add_option("--seed", run.seed, "override the scenario seed");
  simulate->add_option("--output", run.output, "output CSV (default: stdout)");

  auto* estimate = app.add_subcommand("estimate", "run an estimator over a measurement series");
  add_input_flags(estimate, run);
  add_estimator_flags(estimate, run);
  estimate->add_option("--estimator", run.estimator, "alg1-mad | alg1-mean | mehra | als | all")
      ->transform(CLI::CheckedTransformer(estimators, CLI::ignore_case));
  estimate->add_option("--output", run.output, "output CSV (default: stdout)");

  auto* compare = app.add_subcommand("compare", "run all estimators and plot them");
  add_input_flags(compare, run);
  add_estimator_flags(compare, run);
  compare->add_option("--output", run.output, "combined CSV (default: stdout)");
  compare->add_option("--plot", run.plot, "SVG output")->required();

  auto* diagnose = app.add_subcommand("diagnose", "per-window error decomposition (needs 'x')");
  add_input_flags(diagnose, run);
  add_estimator_flags(diagnose, run);
  diagnose->add_option("--output", run.output, "output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? noisevar::cli::kOk : noisevar::cli::kUsage;
  }

  if (simulate->parsed()) return noisevar::cli::cmd_simulate(run);
  if (estimate->parsed()) return noisevar::cli::cmd_estimate(run);
  if (compare->parsed()) {
    run.estimator = EstimatorChoice::All;
    return noisevar::cli::cmd_compare(run);
  }
  return noisevar::cli::cmd_diagnose(run);
}
