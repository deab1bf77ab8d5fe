#include "ahrs_cli/commands.hpp"

#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ahrs/log_csv.hpp"
#include "ahrs/run_config.hpp"
#include "ahrs/trial.hpp"

namespace ahrs::cli {

namespace {

std::string fixed(double value, int decimals = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

/// Loads the run config (defaults when no path) and applies command-line overrides.
RunConfig resolve_config(const CommonOptions& options) {
  RunConfig cfg = options.config_path ? load_run_config(*options.config_path) : RunConfig{};
  if (options.estimator) cfg.estimator.kind = *options.estimator;
  if (options.seed) {
    cfg.seed = *options.seed;
    cfg.corruption.seed = *options.seed;
  }
  return cfg;
}

/// Writes `content` to the --out file, or to `out` when no file was given.
bool emit(const CommonOptions& options, const std::string& content, std::ostream& out, std::ostream& err) {
  if (!options.out_path) {
    out << content;
    return true;
  }
  std::ofstream file(*options.out_path, std::ios::binary | std::ios::trunc);
  if (!(file << content) || !file.flush()) {
    err << "error: cannot write output file '" << *options.out_path << "'\n";
    return false;
  }
  return true;
}

/// Where the human-readable summary goes: stdout, unless stdout carries the CSV.
std::ostream& summary_stream(const CommonOptions& options, std::ostream& out, std::ostream& err) {
  return options.out_path ? out : err;
}

struct ReplayTally {
  std::size_t frames = 0;
  std::size_t corrections = 0;
  std::array<std::size_t, 4> selections{};
  std::size_t skipped[5]{};  // indexed by SkipReason
  std::size_t scored = 0;
  std::array<double, 3> max_err{};
  std::array<double, 3> sum_sq{};
};

void write_replay_summary(std::ostream& s, const std::string& log_path, const RunConfig& cfg,
                          const ReplayTally& tally, const SensorLog& log, const AttitudeEstimator& filter) {
  s << "replay summary: " << log_path << '\n';
  s << "  estimator: " << to_string(cfg.estimator.kind) << '\n';
  s << "  frames: " << tally.frames << " accepted, " << log.warnings.size() << " rejected\n";
  s << "  corrections applied: " << tally.corrections << '\n';
  for (const PairSelection p : {PairSelection::AccelPrimary, PairSelection::MagPrimary,
                                PairSelection::SkipMagUnreliable, PairSelection::SkipAcrobatic}) {
    s << "  selection " << to_string(p) << ": " << tally.selections[static_cast<std::size_t>(p)] << '\n';
  }
  for (const SkipReason r : {SkipReason::MagUnreliable, SkipReason::Acrobatic, SkipReason::DegeneratePair,
                             SkipReason::SingularInnovation}) {
    s << "  skipped " << to_string(r) << ": " << tally.skipped[static_cast<std::size_t>(r)] << '\n';
  }
  if (filter.initialized()) {
    const Vec3 b = filter.state().gyro_bias() * kRadToDeg;
    s << "  final gyro bias (deg/s): " << fixed(b.x()) << ' ' << fixed(b.y()) << ' ' << fixed(b.z()) << '\n';
  }
  if (tally.scored == 0) {
    s << "  truth: none scored\n";
    return;
  }
  const char* names[3] = {"roll", "pitch", "yaw"};
  s << "  errors vs truth for t >= " << fixed(cfg.evaluation.settle_time_s, 1) << " s (" << tally.scored
    << " samples), degrees:\n";
  for (int i = 0; i < 3; ++i) {
    s << "    " << names[i] << ": max " << fixed(tally.max_err[i]) << "  rms "
      << fixed(std::sqrt(tally.sum_sq[i] / static_cast<double>(tally.scored))) << '\n';
  }
  const bool pass = tally.max_err[0] <= cfg.criterion.max_roll_deg &&
                    tally.max_err[1] <= cfg.criterion.max_pitch_deg && tally.max_err[2] <= cfg.criterion.max_yaw_deg;
  s << "  criterion (" << fixed(cfg.criterion.max_roll_deg, 2) << '/' << fixed(cfg.criterion.max_pitch_deg, 2)
    << '/' << fixed(cfg.criterion.max_yaw_deg, 2) << " deg): " << (pass ? "met" : "violated") << '\n';
}

}  // namespace

int replay(const std::string& log_path, const CommonOptions& options, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = resolve_config(options);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidConfig;
  }

  SensorLog log;
  {
    std::ifstream in(log_path, std::ios::binary);
    if (!in) {
      err << "error: cannot open sensor log '" << log_path << "'\n";
      return kMalformedInput;
    }
    try {
      log = read_sensor_log(in, log_path);
    } catch (const LogFormatError& e) {
      err << "error: " << e.what() << '\n';
      return kMalformedInput;
    }
  }
  for (const std::string& w : log.warnings) err << "warning: " << w << '\n';

  std::ostringstream csv;
  write_estimate_header(csv);
  AttitudeEstimator filter(cfg.estimator);
  ReplayTally tally;
  int code = kSuccess;
  for (std::size_t k = 0; k < log.records.size(); ++k) {
    const LogRecord& rec = log.records[k];
    const std::optional<double> next_t =
        k + 1 < log.records.size() ? std::optional<double>{log.records[k + 1].frame.t} : std::nullopt;
    std::optional<StepOutput> step;
    try {
      step = filter.step(rec.frame, next_t);
    } catch (const EstimatorDiverged& e) {
      err << "error: " << log_path << ": line " << rec.line << ": " << e.what() << '\n';
      code = kDiverged;
      break;
    }
    if (!step) continue;
    write_estimate_row(csv, *step);
    ++tally.frames;
    if (step->correction_applied) ++tally.corrections;
    if (step->action.selection) ++tally.selections[static_cast<std::size_t>(*step->action.selection)];
    ++tally.skipped[static_cast<std::size_t>(step->action.reason)];
    if (rec.truth && rec.frame.t >= cfg.evaluation.settle_time_s) {
      const auto e = sim::euler_errors(quaternion_to_euler(step->state.attitude()), *rec.truth);
      ++tally.scored;
      for (int i = 0; i < 3; ++i) {
        const double deg = std::abs(e[i]) * kRadToDeg;
        tally.max_err[i] = std::max(tally.max_err[i], deg);
        tally.sum_sq[i] += deg * deg;
      }
    }
  }

  if (!emit(options, csv.str(), out, err)) return kInvalidConfig;
  write_replay_summary(summary_stream(options, out, err), log_path, cfg, tally, log, filter);
  return code;
}

int simulate(const std::string& script_path, const CommonOptions& options, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::vector<sim::Maneuver> script;
  std::vector<sim::TruthSample> truth;
  try {
    cfg = resolve_config(options);
    script = load_maneuver_script(script_path);
    truth = sim::generate_trajectory(script, cfg.dt(), cfg.environment());
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: " << script_path << ": " << e.what() << '\n';
    return kInvalidConfig;
  }

  const std::vector<SensorFrame> frames = sim::corrupt(truth, cfg.corruption, cfg.dt());
  std::ostringstream csv;
  write_sensor_log_header(csv);
  for (std::size_t k = 0; k < frames.size(); ++k) write_sensor_log_row(csv, frames[k], truth[k].euler);
  if (!emit(options, csv.str(), out, err)) return kInvalidConfig;

  summary_stream(options, out, err) << "simulated " << frames.size() << " frames ("
                                    << fixed(truth.back().t + cfg.dt(), 2) << " s) from " << script_path
                                    << ", seed " << cfg.corruption.seed << '\n';
  return kSuccess;
}

int sweep(const std::string& spec_path, const CommonOptions& options, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  SweepPlan plan;
  std::vector<sim::TruthSample> truth;
  try {
    cfg = resolve_config(options);
    plan = load_sweep_plan(spec_path);
    std::vector<sim::Maneuver> script;
    if (plan.script == "canonical") {
      script = sim::canonical_script();
    } else {
      std::filesystem::path p(plan.script);
      if (p.is_relative()) p = std::filesystem::path(spec_path).parent_path() / p;
      script = load_maneuver_script(p.string());
    }
    truth = sim::generate_trajectory(script, cfg.dt(), cfg.environment());
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: " << spec_path << ": " << e.what() << '\n';
    return kInvalidConfig;
  }
  if (options.estimator) plan.estimators = {*options.estimator};

  std::ostringstream csv;
  csv << "parameter,unit,estimator,tolerance,trials,pass_fraction,non_monotone,evaluations\n";
  std::ostream& log = summary_stream(options, out, err);
  for (sim::ToleranceSweepSpec spec : plan.sweeps) {
    if (options.seed) spec.seed = *options.seed;
    for (const EstimatorKind kind : plan.estimators) {
      sim::SweepContext ctx;
      ctx.truth = &truth;
      ctx.dt = cfg.dt();
      ctx.base = cfg.corruption;
      ctx.estimator = cfg.estimator;
      ctx.estimator.kind = kind;
      ctx.options = cfg.evaluation;
      const sim::SweepResult r = sim::tolerance_sweep(spec, ctx);
      csv << sim::to_string(r.parameter) << ',' << sim::sweep_unit(r.parameter.channel) << ',' << to_string(kind)
          << ',' << format_number(r.tolerance) << ',' << r.trials << ',' << format_number(r.pass_fraction_at_tolerance)
          << ',' << (r.non_monotone ? 1 : 0) << ',' << r.evaluated.size() << '\n';
      log << "swept " << sim::to_string(r.parameter) << " (" << to_string(kind) << "): tolerance "
          << fixed(r.tolerance) << ' ' << sim::sweep_unit(r.parameter.channel)
          << (r.non_monotone ? " [non-monotone]" : "") << '\n';
    }
  }
  return emit(options, csv.str(), out, err) ? kSuccess : kInvalidConfig;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"AHRS harness: replay sensor logs, simulate flights, sweep error tolerances", "ahrs_cli"};
  app.require_subcommand(1);

  CommonOptions options;
  std::string config, out_path, estimator, input;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Run configuration file");
    sub->add_option("--out", out_path, "Output file (default: stdout)");
    sub->add_option("--seed", seed, "RNG seed override");
    sub->add_option("--estimator", estimator, "Estimator override")->check(CLI::IsMember({"ukf", "ekf"}));
  };
  CLI::App* replay_cmd = app.add_subcommand("replay", "Replay a sensor log through the estimator");
  replay_cmd->add_option("log", input, "Sensor log CSV")->required();
  add_common(replay_cmd);
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Generate a corrupted sensor log from a maneuver script");
  simulate_cmd->add_option("script", input, "Maneuver script")->required();
  add_common(simulate_cmd);
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run Monte Carlo tolerance sweeps");
  sweep_cmd->add_option("spec", input, "Sweep specification")->required();
  add_common(sweep_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help, error;
    const int code = app.exit(e, help, error);
    out << help.str();
    err << error.str();
    return code == 0 ? kSuccess : kInvalidConfig;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen->count("--config")) options.config_path = config;
  if (chosen->count("--out")) options.out_path = out_path;
  if (chosen->count("--seed")) options.seed = seed;
  if (chosen->count("--estimator")) options.estimator = parse_estimator(estimator);

  if (chosen == replay_cmd) return replay(input, options, out, err);
  if (chosen == simulate_cmd) return simulate(input, options, out, err);
  return sweep(input, options, out, err);
}

}  // namespace ahrs::cli
