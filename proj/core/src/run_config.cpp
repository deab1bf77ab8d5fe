#include "ahrs/run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ahrs {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || end != t.data() + t.size() || !std::isfinite(value)) {
    throw ConfigError(where + ": '" + text + "' is not a finite number");
  }
  return value;
}

std::uint64_t to_uint(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || end != t.data() + t.size()) {
    throw ConfigError(where + ": '" + text + "' is not a non-negative integer");
  }
  return value;
}

/// One value broadcast to all axes, or exactly three comma-separated values.
Vec3 to_vec3(const std::string& text, const std::string& where) {
  const auto parts = split(text, ',');
  if (parts.size() == 1) return Vec3::Constant(to_double(parts[0], where));
  if (parts.size() != 3) throw ConfigError(where + ": expected 1 or 3 comma-separated values");
  return {to_double(parts[0], where), to_double(parts[1], where), to_double(parts[2], where)};
}

/// INI reader that insists every (section, key) pair is consumed by a known setter.
class IniReader {
 public:
  IniReader(std::istream& in, std::string source) : source_{std::move(source)} {
    try {
      pt::read_ini(in, tree_);
    } catch (const pt::ini_parser_error& e) {
      throw ConfigError(source_ + ": line " + std::to_string(e.line()) + ": " + e.message());
    }
    for (const auto& [section, body] : tree_) {
      if (!body.data().empty()) throw ConfigError(source_ + ": key '" + section + "' must be inside a section");
      for (const auto& [key, value] : body) unread_.insert(section + "." + key);
    }
  }

  std::vector<std::string> sections() const {
    std::vector<std::string> out;
    for (const auto& [section, body] : tree_) out.push_back(section);
    return out;
  }

  template <typename Fn>
  void with(const std::string& section, const std::string& key, Fn&& apply) {
    // Section names may themselves contain dots ([bounds.gyro_r_bias]), so the lookup is by
    // exact child name rather than a dotted ptree path.
    const auto body = tree_.get_child_optional(pt::ptree::path_type(section, '\0'));
    if (!body) return;
    const auto node = body->get_child_optional(pt::ptree::path_type(key, '\0'));
    if (!node) return;
    unread_.erase(section + "." + key);
    apply(node->data(), source_ + ": [" + section + "] " + key);
  }

  void number(const std::string& section, const std::string& key, double& target) {
    with(section, key, [&](const std::string& v, const std::string& where) { target = to_double(v, where); });
  }
  void vec3(const std::string& section, const std::string& key, Vec3& target) {
    with(section, key, [&](const std::string& v, const std::string& where) { target = to_vec3(v, where); });
  }

  void reject_unknown() const {
    if (unread_.empty()) return;
    const std::string& first = *unread_.begin();
    const auto dot = first.rfind('.');
    throw ConfigError(source_ + ": unknown key '" + first.substr(dot + 1) + "' in section [" +
                      first.substr(0, dot) + "]");
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
  pt::ptree tree_;
  std::set<std::string> unread_;
};

void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

}  // namespace

sim::TrajectoryEnvironment RunConfig::environment() const {
  sim::TrajectoryEnvironment env;
  env.mag_ref_ned = estimator.scheduler.mag_ref_ned;
  env.gravity = estimator.scheduler.gravity;
  return env;
}

RunConfig parse_run_config(std::istream& in, const std::string& source_name) {
  IniReader ini(in, source_name);
  RunConfig cfg;
  EstimatorConfig& est = cfg.estimator;
  SchedulerConfig& sched = est.scheduler;
  sim::CorruptionConfig& sensors = cfg.corruption;

  ini.with("estimator", "type", [&](const std::string& v, const std::string& where) {
    const auto kind = parse_estimator(trim(v));
    if (!kind) throw ConfigError(where + ": expected 'ukf' or 'ekf'");
    est.kind = *kind;
  });
  ini.number("estimator", "alpha", est.ukf.alpha);
  ini.number("estimator", "beta", est.ukf.beta);
  ini.number("estimator", "kappa", est.ukf.kappa);
  double q_quat = 1e-6, q_bias = 0.0, r_obs = 2.5e-3, p0_bias_dps = 5.0;
  ini.number("estimator", "process_noise_quat", q_quat);
  ini.number("estimator", "process_noise_bias_rad2ps2", q_bias);
  ini.number("estimator", "measurement_noise", r_obs);
  ini.number("estimator", "p0_quat", est.p0_quat);
  ini.number("estimator", "p0_bias_dps", p0_bias_dps);
  est.noise = NoiseCovariances::diagonal(q_quat, q_bias, r_obs);
  est.p0_bias = std::pow(p0_bias_dps * kDegToRad, 2);

  ini.vec3("environment", "mag_ref_gauss", sched.mag_ref_ned);
  ini.number("environment", "gravity_mps2", sched.gravity);
  ini.number("preprocess", "accel_cutoff_hz", sched.accel_cutoff_hz);
  ini.number("schedule", "propagate_rate_hz", sched.propagate_rate_hz);
  ini.number("schedule", "gps_fresh_s", sched.gps_fresh_s);

  ini.vec3("sensors", "gyro_bias_dps", sensors.gyro_bias_dps);
  ini.vec3("sensors", "gyro_noise_dps", sensors.gyro_noise_dps);
  ini.vec3("sensors", "accel_bias_mps2", sensors.accel_bias_mps2);
  ini.vec3("sensors", "accel_noise_mps2", sensors.accel_noise_mps2);
  ini.number("sensors", "accel_noise_corner_hz", sensors.accel_noise_corner_hz);
  ini.vec3("sensors", "mag_bias_mgauss", sensors.mag_bias_mgauss);
  ini.vec3("sensors", "mag_noise_mgauss", sensors.mag_noise_mgauss);
  ini.number("sensors", "gps_speed_bias_mps", sensors.gps_speed_bias_mps);
  ini.number("sensors", "gps_speed_noise_mps", sensors.gps_speed_noise_mps);
  ini.number("sensors", "gps_delay_s", sensors.gps_delay_s);
  ini.number("sensors", "gps_rate_hz", sensors.gps_rate_hz);

  ini.number("evaluation", "settle_time_s", cfg.evaluation.settle_time_s);
  ini.number("evaluation", "divergence_deg", cfg.evaluation.divergence_deg);
  ini.number("evaluation", "max_roll_deg", cfg.criterion.max_roll_deg);
  ini.number("evaluation", "max_pitch_deg", cfg.criterion.max_pitch_deg);
  ini.number("evaluation", "max_yaw_deg", cfg.criterion.max_yaw_deg);

  ini.with("run", "seed", [&](const std::string& v, const std::string& where) { cfg.seed = to_uint(v, where); });
  ini.reject_unknown();

  const std::string& src = ini.source();
  require(q_quat >= 0.0 && q_bias >= 0.0, src + ": process noise must be non-negative");
  require(r_obs > 0.0, src + ": measurement_noise must be positive");
  require(est.p0_quat >= 0.0 && p0_bias_dps >= 0.0, src + ": initial covariance must be non-negative");
  require(sched.mag_ref_ned.norm() > 0.0, src + ": mag_ref_gauss must be nonzero");
  require(sched.gravity > 0.0, src + ": gravity_mps2 must be positive");
  require(sched.propagate_rate_hz > 0.0, src + ": propagate_rate_hz must be positive");
  require(sched.accel_cutoff_hz > 0.0 && sched.accel_cutoff_hz < sched.propagate_rate_hz / 2.0,
          src + ": accel_cutoff_hz must lie in (0, propagate_rate_hz / 2)");
  require(sched.gps_fresh_s > 0.0, src + ": gps_fresh_s must be positive");
  require(cfg.evaluation.settle_time_s >= 0.0 && cfg.evaluation.divergence_deg > 0.0,
          src + ": evaluation thresholds must be positive");
  try {
    make_weights<kStateDim>(est.ukf);
    sensors.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(src + ": " + e.what());
  }
  sensors.seed = cfg.seed;
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_run_config(in, path);
}

std::vector<sim::Maneuver> parse_maneuver_script(std::istream& in, const std::string& source_name) {
  std::vector<sim::Maneuver> script;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream tokens(line);
    std::string kind;
    if (!(tokens >> kind)) continue;
    const std::string where = source_name + ": line " + std::to_string(line_no);

    if (kind == "canonical") {
      const auto canonical = sim::canonical_script();
      script.insert(script.end(), canonical.begin(), canonical.end());
      continue;
    }

    std::map<std::string, std::string> args;
    std::string token;
    while (tokens >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) throw ConfigError(where + ": expected key=value, got '" + token + "'");
      if (!args.emplace(token.substr(0, eq), token.substr(eq + 1)).second) {
        throw ConfigError(where + ": duplicate key '" + token.substr(0, eq) + "'");
      }
    }
    auto take = [&](const std::string& key) -> std::optional<double> {
      const auto it = args.find(key);
      if (it == args.end()) return std::nullopt;
      const double v = to_double(it->second, where + " " + key);
      args.erase(it);
      return v;
    };
    auto need = [&](const std::string& key) {
      const auto v = take(key);
      if (!v) throw ConfigError(where + ": '" + kind + "' requires " + key);
      return *v;
    };

    sim::Maneuver m;
    if (const auto it = args.find("mag_disturbance_gauss"); it != args.end()) {
      m.mag_disturbance = to_vec3(it->second, where + " mag_disturbance_gauss");
      args.erase(it);
    }
    m.mag_disturbance_start = take("mag_disturbance_start_s").value_or(0.0);
    m.mag_disturbance_end = take("mag_disturbance_end_s");
    require(m.mag_disturbance_start >= 0.0 &&
                (!m.mag_disturbance_end || *m.mag_disturbance_end > m.mag_disturbance_start),
            where + ": mag disturbance window must satisfy 0 <= start < end");
    if (kind == "steady") {
      sim::SteadyFlight s;
      s.duration = need("duration_s");
      s.speed = take("speed_mps").value_or(s.speed);
      require(s.speed >= 0.0, where + ": speed_mps must be non-negative");
      m.kind = s;
    } else if (kind == "turn") {
      sim::CoordinatedTurn t;
      t.duration = need("duration_s");
      t.bank = need("bank_deg") * kDegToRad;
      if (const auto r = take("yaw_rate_dps")) t.yaw_rate = *r * kDegToRad;
      t.roll_time = take("roll_time_s").value_or(t.roll_time);
      require(std::abs(t.bank) < kPi / 2.0, where + ": bank_deg must be within (-90, 90)");
      require(t.roll_time >= 0.0, where + ": roll_time_s must be non-negative");
      m.kind = t;
    } else if (kind == "doublet") {
      sim::PitchDoublet d;
      d.duration = need("duration_s");
      d.amplitude = need("amplitude_dps") * kDegToRad;
      m.kind = d;
    } else if (kind == "gust") {
      sim::Gust g;
      g.duration = need("duration_s");
      g.rms = need("rms_deg") * kDegToRad;
      if (const auto s = take("seed")) g.seed = static_cast<std::uint64_t>(*s);
      require(g.rms >= 0.0, where + ": rms_deg must be non-negative");
      m.kind = g;
    } else {
      throw ConfigError(where + ": unknown maneuver '" + kind + "'");
    }
    if (!args.empty()) throw ConfigError(where + ": unknown key '" + args.begin()->first + "'");
    require(sim::duration(m) > 0.0, where + ": duration_s must be positive");
    script.push_back(m);
  }
  if (script.empty()) throw ConfigError(source_name + ": maneuver script is empty");
  return script;
}

std::vector<sim::Maneuver> load_maneuver_script(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open script file '" + path + "'");
  return parse_maneuver_script(in, path);
}

SweepPlan parse_sweep_plan(std::istream& in, const std::string& source_name) {
  IniReader ini(in, source_name);
  SweepPlan plan;
  plan.script = "canonical";

  std::vector<sim::SweepParameter> params;
  ini.with("sweep", "parameters", [&](const std::string& v, const std::string& where) {
    for (const auto& name : split(v, ',')) {
      const auto p = sim::parse_sweep_parameter(name);
      if (!p) throw ConfigError(where + ": unknown sweep parameter '" + name + "'");
      params.push_back(*p);
    }
  });
  require(!params.empty(), source_name + ": [sweep] parameters is required");

  plan.estimators = {EstimatorKind::Ukf};
  ini.with("sweep", "estimators", [&](const std::string& v, const std::string& where) {
    plan.estimators.clear();
    for (const auto& name : split(v, ',')) {
      const auto k = parse_estimator(name);
      if (!k) throw ConfigError(where + ": unknown estimator '" + name + "'");
      plan.estimators.push_back(*k);
    }
  });
  require(!plan.estimators.empty(), source_name + ": [sweep] estimators is empty");

  sim::ToleranceSweepSpec common;
  double trials = common.trials, verify = common.verify_points;
  ini.number("sweep", "trials", trials);
  ini.number("sweep", "pass_fraction", common.pass_fraction);
  ini.number("sweep", "verify_points", verify);
  ini.with("sweep", "seed", [&](const std::string& v, const std::string& where) { common.seed = to_uint(v, where); });
  ini.with("sweep", "script", [&](const std::string& v, const std::string&) { plan.script = trim(v); });
  ini.number("criterion", "max_roll_deg", common.criterion.max_roll_deg);
  ini.number("criterion", "max_pitch_deg", common.criterion.max_pitch_deg);
  ini.number("criterion", "max_yaw_deg", common.criterion.max_yaw_deg);
  require(trials >= 1.0 && trials == std::floor(trials), source_name + ": trials must be a positive integer");
  require(verify >= 0.0 && verify == std::floor(verify), source_name + ": verify_points must be a non-negative integer");
  common.trials = static_cast<int>(trials);
  common.verify_points = static_cast<int>(verify);

  for (const auto& p : params) {
    sim::ToleranceSweepSpec spec = common;
    spec.parameter = p;
    spec.upper = sim::default_sweep_upper(p);
    const std::string section = "bounds." + sim::to_string(p);
    ini.number(section, "lower", spec.lower);
    ini.number(section, "upper", spec.upper);
    ini.number(section, "resolution", spec.resolution);
    try {
      spec.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(source_name + ": " + sim::to_string(p) + ": " + e.what());
    }
    plan.sweeps.push_back(spec);
  }
  ini.reject_unknown();
  return plan;
}

SweepPlan load_sweep_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sweep spec '" + path + "'");
  return parse_sweep_plan(in, path);
}

}  // namespace ahrs
