#include "zupt/adaptive_threshold.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>
#include <vector>

namespace zupt {

namespace {

WarningSink& warning_sink() {
  static WarningSink sink = [](std::string_view message) { std::cerr << "warning: " << message << '\n'; };
  return sink;
}

void require_samples(std::span<const double> samples, const char* name) {
  if (samples.empty()) throw Error(ErrorKind::CalibrationData, std::string("calibration set '") + name + "' is empty");
}

}  // namespace

void set_warning_sink(WarningSink sink) { warning_sink() = std::move(sink); }

void warn(std::string_view message) {
  if (warning_sink()) warning_sink()(message);
}

PriorMode parse_prior_mode(const std::string& name) {
  if (name == "informative") return PriorMode::Informative;
  if (name == "uninformative") return PriorMode::Uninformative;
  throw Error(ErrorKind::Config, "unknown prior '" + name + "' (expected informative|uninformative)");
}

const char* to_string(PriorMode mode) {
  return mode == PriorMode::Informative ? "informative" : "uninformative";
}

DetectorRuntime update_runtime(const DetectorRuntime& rt, Hypothesis decision, double t_now) {
  if (!(t_now >= rt.current_time)) {
    std::ostringstream msg;
    msg << "update_runtime: time went backwards (" << t_now << " < " << rt.current_time << ")";
    throw Error(ErrorKind::Contract, msg.str());
  }
  DetectorRuntime next = rt;
  next.current_time = t_now;
  if (decision == Hypothesis::Stationary) next.last_zupt_time = t_now;
  return next;
}

double empirical_quantile(std::span<const double> samples, double probability) {
  if (samples.empty()) throw Error(ErrorKind::CalibrationData, "quantile of an empty sample set");
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw Error(ErrorKind::Config, "quantile probability must lie in [0, 1]");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  // 1-based fractional rank under plotting positions (k - 0.5) / n.
  const double h = n * probability + 0.5;
  if (h <= 1.0) return sorted.front();
  if (h >= n) return sorted.back();
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  return sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1]);
}

ThresholdParams calibrate(const CalibrationInputs& in) {
  if (!(in.epsilon > 0.0 && in.epsilon < 0.5)) {
    throw Error(ErrorKind::Config, "epsilon must lie in (0, 0.5)");
  }
  if (!(in.dtau > 0.0)) throw Error(ErrorKind::Config, "dtau must be positive");
  require_samples(in.stationary_log_lr, "stationary");
  require_samples(in.midstance_log_lr, "midstance");

  ThresholdParams out;
  out.c1 = empirical_quantile(in.stationary_log_lr, in.epsilon);
  out.c2 = (empirical_quantile(in.midstance_log_lr, in.epsilon) - out.c1) / in.dtau;
  if (out.c2 > 0.0) {
    std::ostringstream msg;
    msg << "calibrated c2 = " << out.c2 << " > 0 (midstance looks more stationary than standing still); clamped to 0";
    warn(msg.str());
    out.c2 = 0.0;
  }

  if (in.prior == PriorMode::Informative) {
    require_samples(in.swing_log_lr, "swing");
    if (!(in.swing_xi_star > 0.0)) throw Error(ErrorKind::Config, "swing xi* must be positive for the informative prior");
    const double swing_q = empirical_quantile(in.swing_log_lr, 1.0 - in.epsilon);
    out.c3 = (swing_q - out.c1 - out.c2 * in.dtau / 2.0) / in.swing_xi_star;
    // Swing already rejected without help from xi; a negative slope would
    // invert the prior and pull swing windows toward stationary.
    if (out.c3 < 0.0) {
      std::ostringstream msg;
      msg << "calibrated c3 = " << out.c3 << " < 0 (swing already rejected at dtau/2); clamped to 0";
      warn(msg.str());
      out.c3 = 0.0;
    }
  }
  return out;
}

}  // namespace zupt
