#include "zupt/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

namespace zupt {

namespace {

enum class Kind { Number, Count, Choice };

struct KeySpec {
  const char* key;
  const char* fallback;
  Kind kind;
  const char* help;
  std::vector<std::string> choices{};
};

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      {"window_samples", "5", Kind::Count, "detector window length in samples (20 ms at 250 Hz)"},
      {"detector", "shoe", Kind::Choice, "detector statistic", {"shoe", "are"}},
      {"threshold_mode", "adaptive", Kind::Choice, "adaptive threshold or classical fixed gamma = exp(c1)",
       {"adaptive", "fixed"}},
      {"prior", "informative", Kind::Choice, "hypothesis prior", {"informative", "uninformative"}},
      {"c1", "-20.43", Kind::Number, "log-threshold constant term"},
      {"c2", "-459.3", Kind::Number, "log-threshold slope in elapsed time since last ZUPT, 1/s (<= 0)"},
      {"c3", "0", Kind::Number, "log-threshold slope in xi"},
      {"decay_floor", "-inf", Kind::Number, "lower bound on c2*dt (log of loss floor / alpha); -inf disables"},
      {"sigma_a", "0.05", Kind::Number, "accelerometer noise std, m/s^2"},
      {"sigma_w", "0.004", Kind::Number, "gyroscope noise std, rad/s"},
      {"gravity", "9.81", Kind::Number, "gravity magnitude, m/s^2"},
      {"sigma_zupt", "0.01", Kind::Number, "zero-velocity measurement std, m/s"},
      {"accel_psd", "0.01", Kind::Number, "accelerometer process noise, m/s^2/sqrt(Hz)"},
      {"gyro_psd", "0.0008", Kind::Number, "gyroscope process noise, rad/s/sqrt(Hz)"},
      {"xi_max_condition", "1e10", Kind::Number, "velocity covariance condition bound before the prior falls back"},
      {"alignment_s", "1", Kind::Number, "initial stationary alignment period, s"},
      {"init_sigma_p", "1e-5", Kind::Number, "initial position std, m"},
      {"init_sigma_v", "0.01", Kind::Number, "initial velocity std, m/s"},
      {"init_sigma_roll_pitch_deg", "0.5", Kind::Number, "initial roll/pitch std, deg"},
      {"init_sigma_yaw_deg", "0.1", Kind::Number, "initial yaw std, deg"},
      {"epsilon", "0.05", Kind::Number, "calibration tail probability, in (0, 0.5)"},
      {"dtau", "0.7", Kind::Number, "approximate step duration for calibration, s"},
      {"accel_unit", "auto", Kind::Choice, "input accelerometer unit", {"auto", "mps2", "g"}},
      {"gyro_unit", "auto", Kind::Choice, "input gyroscope unit", {"auto", "rad", "deg"}},
      {"seed", "1", Kind::Count, "simulator seed"},
      {"sim_gait", "normal", Kind::Choice, "simulated gait preset", {"normal", "fast", "standing"}},
      {"sim_duration", "60", Kind::Number, "simulated duration, s"},
      {"sim_path", "loop", Kind::Choice, "simulated path", {"loop", "straight"}},
      {"sim_noiseless", "0", Kind::Choice, "disable simulated sensor noise", {"0", "1"}},
      {"sweep_c1_min", "-5000", Kind::Number, "lowest fixed log-threshold in sweeps"},
      {"sweep_c1_max", "-20", Kind::Number, "highest fixed log-threshold in sweeps"},
      {"sweep_points", "20", Kind::Count, "number of fixed thresholds in sweeps"},
      {"threads", "0", Kind::Count, "worker threads for sweeps (0 = hardware concurrency)"},
  };
  return specs;
}

const KeySpec* find_spec(const std::string& key) {
  for (const auto& s : key_specs()) {
    if (key == s.key) return &s;
  }
  return nullptr;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number_or_throw(const std::string& key, const std::string& value) {
  if (value == "-inf") return -std::numeric_limits<double>::infinity();
  if (value == "inf") return std::numeric_limits<double>::infinity();
  double x = 0.0;
  const char* first = value.data();
  if (!value.empty() && value.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, value.data() + value.size(), x);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorKind::Config, "config key '" + key + "': '" + value + "' is not a number");
  }
  return x;
}

}  // namespace

Config::Config() {
  for (const auto& s : key_specs()) values_[s.key] = s.fallback;
}

bool Config::known(const std::string& key) { return find_spec(key) != nullptr; }

void Config::set(const std::string& key, const std::string& value) {
  const KeySpec* spec = find_spec(key);
  if (!spec) throw Error(ErrorKind::Config, "unknown config key '" + key + "'");
  switch (spec->kind) {
    case Kind::Number: parse_number_or_throw(key, value); break;
    case Kind::Count: {
      const double x = parse_number_or_throw(key, value);
      if (!(x >= 0) || std::floor(x) != x) {
        throw Error(ErrorKind::Config, "config key '" + key + "' needs a non-negative integer");
      }
      break;
    }
    case Kind::Choice:
      if (std::find(spec->choices.begin(), spec->choices.end(), value) == spec->choices.end()) {
        std::string allowed;
        for (const auto& c : spec->choices) allowed += (allowed.empty() ? "" : "|") + c;
        throw Error(ErrorKind::Config, "config key '" + key + "' must be one of " + allowed);
      }
      break;
  }
  values_[key] = value;
}

void Config::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw Error(ErrorKind::Config, "expected key=value, got '" + assignment + "'");
  set(std::string(trim(std::string_view(assignment).substr(0, eq))),
      std::string(trim(std::string_view(assignment).substr(eq + 1))));
}

void Config::load(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const auto body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    try {
      set_assignment(std::string(body));
    } catch (const Error& e) {
      throw Error(ErrorKind::Config, "config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open config file '" + path + "'");
  load(in);
}

const std::string& Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorKind::Config, "unknown config key '" + key + "'");
  return it->second;
}

double Config::number(const std::string& key) const { return parse_number_or_throw(key, get(key)); }

std::size_t Config::count(const std::string& key) const { return static_cast<std::size_t>(number(key)); }

std::vector<std::pair<std::string, std::string>> Config::entries() const {
  return {values_.begin(), values_.end()};
}

void Config::print(std::ostream& out) const {
  for (const auto& s : key_specs()) {
    out << "# " << s.help << '\n' << s.key << " = " << get(s.key) << '\n';
  }
}

PipelineConfig pipeline_config(const Config& c) {
  constexpr double deg = std::numbers::pi / 180.0;
  PipelineConfig p;
  p.window_samples = c.count("window_samples");
  if (p.window_samples == 0) throw Error(ErrorKind::Config, "window_samples must be at least 1");
  p.detector = parse_detector_kind(c.get("detector"));
  p.noise.sigma_a = c.number("sigma_a");
  p.noise.sigma_w = c.number("sigma_w");
  p.noise.gravity_mag = c.number("gravity");
  p.noise.sigma_zupt = c.number("sigma_zupt");
  require_valid(p.noise);
  p.process.accel_psd = c.number("accel_psd");
  p.process.gyro_psd = c.number("gyro_psd");
  if (!p.process.valid()) throw Error(ErrorKind::Config, "accel_psd and gyro_psd must be positive");
  p.mode = parse_threshold_mode(c.get("threshold_mode"));
  p.prior = parse_prior_mode(c.get("prior"));
  p.threshold = threshold_params(c);
  p.fixed_log_gamma = p.threshold.c1;
  p.xi_max_condition = c.number("xi_max_condition");
  p.alignment_s = c.number("alignment_s");
  p.initial.position_m = c.number("init_sigma_p");
  p.initial.velocity_mps = c.number("init_sigma_v");
  p.initial.roll_pitch_rad = c.number("init_sigma_roll_pitch_deg") * deg;
  p.initial.yaw_rad = c.number("init_sigma_yaw_deg") * deg;
  return p;
}

ThresholdParams threshold_params(const Config& c) {
  ThresholdParams t;
  t.c1 = c.number("c1");
  t.c2 = c.number("c2");
  t.c3 = c.number("c3");
  t.decay_floor = c.number("decay_floor");
  if (!t.finite()) throw Error(ErrorKind::Config, "c1, c2, c3 must be finite");
  if (t.decay_floor > 0) throw Error(ErrorKind::Config, "decay_floor must be <= 0");
  if (t.c2 > 0) {
    warn("c2 > 0 makes the threshold grow with time since the last ZUPT; clamped to 0");
    t.c2 = 0.0;
  }
  return t;
}

void store_threshold_params(Config& c, const ThresholdParams& t) {
  c.set("c1", format_double(t.c1));
  c.set("c2", format_double(t.c2));
  c.set("c3", format_double(t.c3));
}

CsvFormat csv_format(const Config& c) {
  CsvFormat f;
  f.accel_unit = parse_accel_unit(c.get("accel_unit"));
  f.gyro_unit = parse_gyro_unit(c.get("gyro_unit"));
  return f;
}

GaitProfile gait_profile(const Config& c) {
  const auto& gait = c.get("sim_gait");
  GaitProfile g = gait == "fast" ? GaitProfile::fast_gait()
                  : gait == "standing" ? GaitProfile::standing()
                                       : GaitProfile::normal_gait();
  g.seed = c.count("seed");
  g.add_noise = c.get("sim_noiseless") == "0";
  g.noise.sigma_a = c.number("sigma_a");
  g.noise.sigma_w = c.number("sigma_w");
  g.noise.gravity_mag = c.number("gravity");
  return g;
}

}  // namespace zupt
