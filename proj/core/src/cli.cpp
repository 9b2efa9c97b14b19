#include "earlystop/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "earlystop/conditional.hpp"
#include "earlystop/domain.hpp"
#include "earlystop/errors.hpp"
#include "earlystop/evaluate.hpp"
#include "earlystop/io.hpp"
#include "earlystop/marginal.hpp"
#include "earlystop/synth.hpp"
#include "earlystop/version.hpp"

namespace earlystop {

namespace {

struct CalibrateArgs {
  std::string mode;
  std::string input;
  std::string output;
  std::string log;  // defaults to output with a .log.json extension
  CalibConfig cfg;
};

struct EvaluateArgs {
  std::string input;
  std::string thresholds;
  std::string report;
};

struct SimulateArgs {
  std::string params;
  std::string output;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

struct McArgs {
  std::string params;
  std::string mode;
  std::string report;
  std::size_t trials = 0;
  std::size_t test_pool = 0;
  CalibConfig cfg;
};

std::string default_log_path(const std::string& output) {
  std::filesystem::path p(output);
  p.replace_extension(".log.json");
  return p.string();
}

void run_calibrate(const CalibrateArgs& a, std::ostream& out) {
  const TraceSet cal = parse_traces(std::filesystem::path(a.input));
  const std::size_t t_max = cal.horizon();

  ThresholdFile tf;
  tf.t_max = t_max;
  tf.grid_delta = a.cfg.grid_delta;
  tf.alpha = a.cfg.alpha;
  tf.delta = a.cfg.delta;
  tf.mode = a.mode;
  tf.seed = a.cfg.seed;
  tf.tool_version = std::string(kVersion);

  std::string log_json;
  if (a.mode == "marginal") {
    const MarginalResult r = calibrate_marginal(cal, a.cfg);
    tf.thresholds = r.thresholds(t_max);
    tf.split_sizes = {cal.size()};
    log_json = marginal_log_to_json(r);
    if (r.lambda_hat == kNeverHalt)
      out << "lambda_hat = inf (no threshold certified; rule never halts early)\n";
    else
      out << "lambda_hat = " << r.lambda_hat << "\n";
  } else {
    const ConditionalResult r = calibrate_conditional(cal, a.cfg);
    tf.thresholds = r.lambda_hat;
    tf.split_sizes = {r.stage1_indices.size(), r.stage2_indices.size()};
    log_json = conditional_log_to_json(r);
    out << "t_star = " << r.t_star;
    if (r.t_star > t_max) out << " (no suffix certified; rule never halts early)";
    out << "\n";
  }

  const std::string log_path = a.log.empty() ? default_log_path(a.output) : a.log;
  write_threshold_file(std::filesystem::path(a.output), tf);
  write_text_file_atomic(std::filesystem::path(log_path), log_json);
  out << "wrote " << a.output << " and " << log_path << "\n";
}

void run_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const TraceSet test = parse_traces(std::filesystem::path(a.input));
  const ThresholdFile tf = read_threshold_file(std::filesystem::path(a.thresholds));
  if (tf.t_max != test.horizon()) {
    std::ostringstream msg;
    msg << "t_max mismatch: traces have horizon " << test.horizon() << " but `" << a.thresholds
        << "` was calibrated for " << tf.t_max;
    throw DomainError(msg.str());
  }

  const RiskReport report = evaluate_rule(test, tf.thresholds);
  write_text_file_atomic(std::filesystem::path(a.report), risk_report_to_json(report));

  out << "n = " << report.n << ", t_max = " << report.t_max << "\n";
  out << std::fixed << std::setprecision(4);
  out << "marginal gap   " << report.marginal_gap << "\n";
  out << "T_avg          " << report.t_avg << "\n";
  out << "early accuracy " << report.early_accuracy << "   full accuracy " << report.full_accuracy
      << "\n";
  out << "gap, earliest 20% " << report.quantile_gap_20 << "   earliest 50% "
      << report.quantile_gap_50 << "\n";
  out << "   t   halts   cum.halts   cum.gap\n";
  for (std::size_t t = 0; t < report.t_max; ++t) {
    out << std::setw(4) << (t + 1) << std::setw(8) << report.halt_histogram[t] << std::setw(12)
        << report.accumulated_halts[t];
    if (report.accumulated_gap[t])
      out << std::setw(10) << *report.accumulated_gap[t];
    else
      out << std::setw(10) << "-";
    out << "\n";
  }
  out << "wrote " << a.report << "\n";
}

void run_simulate(const SimulateArgs& a, std::ostream& out) {
  GenParams params = read_gen_params(std::filesystem::path(a.params));
  if (a.seed_given) params.seed = a.seed;
  const TraceSet traces = generate_traces(params);
  std::ostringstream buf;
  write_traces(buf, traces);
  write_text_file_atomic(std::filesystem::path(a.output), buf.str());
  out << "wrote " << a.output << " (" << traces.size() << " samples, t_max = "
      << traces.horizon() << ")\n";
}

void run_mc_validate(const McArgs& a, std::ostream& out) {
  const GenParams params = read_gen_params(std::filesystem::path(a.params));
  const CalibrationMode mode =
      a.mode == "marginal" ? CalibrationMode::marginal : CalibrationMode::conditional;
  const MCReport report = mc_validate(params, a.cfg, a.trials, a.test_pool, mode);
  write_text_file_atomic(std::filesystem::path(a.report),
                         mc_report_to_json(report, a.mode, a.cfg, a.test_pool));
  out << std::fixed << std::setprecision(4);
  out << "trials = " << report.trials << "\n";
  out << "marginal violation rate    " << report.marginal_violation_rate << "  (95% CI "
      << report.marginal_rate_ci.first << " - " << report.marginal_rate_ci.second << ")\n";
  out << "conditional violation rate " << report.conditional_violation_rate << "  (95% CI "
      << report.conditional_rate_ci.first << " - " << report.conditional_rate_ci.second << ")\n";
  out << "power (nontrivial rules)   " << report.power << "\n";
  out << "wrote " << a.report << "\n";
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Calibrated early stopping for sequential classifiers"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  const std::vector<std::string> modes = {"marginal", "conditional"};

  CalibrateArgs cal;
  CLI::App* calibrate = app.add_subcommand("calibrate", "Calibrate a stopping rule from traces");
  calibrate->add_option("--mode", cal.mode, "marginal or conditional")
      ->required()
      ->check(CLI::IsMember(modes));
  calibrate->add_option("--input", cal.input, "trace CSV file")->required();
  calibrate->add_option("--output", cal.output, "threshold file to write")->required();
  calibrate->add_option("--log", cal.log, "calibration log path (default: output, .log.json)");
  calibrate->add_option("--alpha", cal.cfg.alpha, "tolerable accuracy gap")
      ->default_val(0.1);
  calibrate->add_option("--delta", cal.cfg.delta, "significance level")->default_val(0.01);
  calibrate->add_option("--grid-delta", cal.cfg.grid_delta, "threshold grid resolution")
      ->default_val(0.01);
  calibrate->add_option("--seed", cal.cfg.seed, "split shuffle seed")->default_val(0);
  calibrate->add_option("--split-frac", cal.cfg.split_fraction, "stage-1 fraction")
      ->default_val(0.5);

  EvaluateArgs ev;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate a rule on held-out traces");
  evaluate->add_option("--input", ev.input, "trace CSV file")->required();
  evaluate->add_option("--thresholds", ev.thresholds, "threshold file")->required();
  evaluate->add_option("--report", ev.report, "report JSON to write")->required();

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Generate a synthetic trace corpus");
  simulate->add_option("--params", sim.params, "generator parameter JSON")->required();
  CLI::Option* seed_opt = simulate->add_option("--seed", sim.seed, "generator seed");
  simulate->add_option("--output", sim.output, "trace CSV to write")->required();

  McArgs mc;
  CLI::App* mcv = app.add_subcommand("mc-validate", "Monte-Carlo check of the guarantees");
  mcv->add_option("--params", mc.params, "generator parameter JSON")->required();
  mcv->add_option("--mode", mc.mode, "marginal or conditional")
      ->required()
      ->check(CLI::IsMember(modes));
  mcv->add_option("--trials", mc.trials, "number of calibration trials")->required();
  mcv->add_option("--test-pool", mc.test_pool, "test pool size per trial")->required();
  mcv->add_option("--report", mc.report, "report JSON to write")->required();
  mcv->add_option("--alpha", mc.cfg.alpha, "tolerable accuracy gap")->default_val(0.1);
  mcv->add_option("--delta", mc.cfg.delta, "significance level")->default_val(0.01);
  mcv->add_option("--grid-delta", mc.cfg.grid_delta, "threshold grid resolution")
      ->default_val(0.01);
  mcv->add_option("--seed", mc.cfg.seed, "master seed for trial derivation")->default_val(0);
  mcv->add_option("--split-frac", mc.cfg.split_fraction, "stage-1 fraction")->default_val(0.5);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (calibrate->parsed()) {
      run_calibrate(cal, out);
    } else if (evaluate->parsed()) {
      run_evaluate(ev, out);
    } else if (simulate->parsed()) {
      sim.seed_given = seed_opt->count() > 0;
      run_simulate(sim, out);
    } else if (mcv->parsed()) {
      run_mc_validate(mc, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace earlystop
