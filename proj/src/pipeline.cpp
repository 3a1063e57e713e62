#include "zupt/pipeline.hpp"

#include <cmath>
#include <limits>

#include "zupt/windowing.hpp"

namespace zupt {

ThresholdMode parse_threshold_mode(const std::string& name) {
  if (name == "adaptive") return ThresholdMode::Adaptive;
  if (name == "fixed") return ThresholdMode::Fixed;
  if (name == "labels") return ThresholdMode::Labels;
  throw Error(ErrorKind::Config, "unknown threshold mode '" + name + "' (expected adaptive|fixed|labels)");
}

const char* to_string(ThresholdMode mode) {
  switch (mode) {
    case ThresholdMode::Adaptive: return "adaptive";
    case ThresholdMode::Fixed: return "fixed";
    case ThresholdMode::Labels: return "labels";
  }
  return "unknown";
}

NavSolution initial_alignment(std::span<const ImuSample> stream, const PipelineConfig& config) {
  if (stream.empty()) throw Error(ErrorKind::EmptyStream, "cannot align on an empty stream");
  Vector3d mean = Vector3d::Zero();
  std::size_t count = 0;
  for (const auto& s : stream) {
    if (count > 0 && s.t - stream.front().t > config.alignment_s) break;
    mean += s.accel;
    ++count;
  }
  mean /= static_cast<double>(count);
  if (!(mean.norm() > 0.0)) throw Error(ErrorKind::DegenerateWindow, "zero mean specific force during alignment");

  const double roll = std::atan2(mean.y(), mean.z());
  const double pitch = std::atan2(-mean.x(), std::hypot(mean.y(), mean.z()));

  NavSolution nav;
  nav.state.q = Eigen::AngleAxisd(pitch, Vector3d::UnitY()) * Eigen::AngleAxisd(roll, Vector3d::UnitX());
  nav.state.q.normalize();

  const auto& u = config.initial;
  Eigen::Matrix<double, 9, 1> sigma;
  sigma << u.position_m, u.position_m, u.position_m, u.velocity_mps, u.velocity_mps, u.velocity_mps,
      u.roll_pitch_rad, u.roll_pitch_rad, u.yaw_rad;
  nav.P = sigma.array().square().matrix().asDiagonal();
  return nav;
}

PipelineResult run_pipeline(std::span<const ImuSample> stream, const PipelineConfig& config,
                            const std::optional<NavSolution>& init, std::span<const std::uint8_t> labels) {
  require_valid_stream(stream);
  require_valid(config.noise);
  if (!config.process.valid()) throw Error(ErrorKind::Config, "process noise densities must be positive");
  const std::size_t N = config.window_samples;
  if (N == 0) throw Error(ErrorKind::Config, "window length must be at least 1");
  if (stream.size() < N) throw Error(ErrorKind::EmptyStream, "stream shorter than one detector window");
  if (config.mode == ThresholdMode::Labels && labels.size() != stream.size()) {
    throw Error(ErrorKind::Config, "labels mode needs one label per sample");
  }
  if (config.mode == ThresholdMode::Adaptive && !config.threshold.finite()) {
    throw Error(ErrorKind::Config, "threshold coefficients must be finite");
  }

  const DetectorFn detector = config.custom_detector;
  const bool use_shoe = !detector && config.detector == DetectorKind::Shoe;
  std::optional<Vector3d> last_direction;
  auto evaluate = [&](const ImuWindow& window) -> double {
    if (detector) return detector(window, config.noise).value;
    if (use_shoe) {
      const auto terms = shoe_terms(window, config.noise, last_direction);
      last_direction = terms.gravity_direction;
      return terms.total();
    }
    return are_log_lr(window, config.noise).value;
  };

  PipelineResult out;
  const std::size_t n = stream.size();
  out.times.reserve(n);
  out.positions.reserve(n);
  out.velocities.reserve(n);
  out.first_window_index = N - 1;
  const std::size_t n_windows = n - N + 1;
  out.decisions.reserve(n_windows);
  out.log_lr.reserve(n_windows);
  out.log_gamma.reserve(n_windows);
  out.xi.reserve(n_windows);
  out.xi_fallback.reserve(n_windows);
  out.dt_since_zupt.reserve(n_windows);

  NavSolution nav = init ? *init : initial_alignment(stream, config);
  DetectorRuntime runtime = DetectorRuntime::starting_at(stream.front().t);

  for (std::size_t k = 0; k < n; ++k) {
    const auto& sample = stream[k];
    if (k > 0) nav = propagate(nav, sample, sample.t - stream[k - 1].t, config.noise, config.process);

    if (k + 1 >= N) {
      const double log_lr = evaluate(window_ending_at(stream, k, N));
      const auto xi_k = xi(nav, config.xi_max_condition);
      const double dt = sample.t - runtime.last_zupt_time;

      double log_gamma = 0.0;
      Hypothesis decision = Hypothesis::Moving;
      switch (config.mode) {
        case ThresholdMode::Fixed:
          log_gamma = config.fixed_log_gamma;
          decision = log_lr > log_gamma ? Hypothesis::Stationary : Hypothesis::Moving;
          break;
        case ThresholdMode::Adaptive: {
          const bool use_prior = config.prior == PriorMode::Informative && !xi_k.fallback;
          log_gamma = log_threshold(config.threshold, dt, use_prior ? xi_k.value : 0.0);
          decision = decide(LogLikelihoodRatio{log_lr, k + 1 - N}, log_gamma);
          break;
        }
        case ThresholdMode::Labels:
          log_gamma = std::numeric_limits<double>::quiet_NaN();
          decision = labels[k] ? Hypothesis::Stationary : Hypothesis::Moving;
          break;
      }

      if (decision == Hypothesis::Stationary) {
        nav = zupt_update(nav, config.noise);
        ++out.zupt_count;
      }
      runtime = update_runtime(runtime, decision, sample.t);

      out.decisions.push_back(decision);
      out.log_lr.push_back(log_lr);
      out.log_gamma.push_back(log_gamma);
      out.xi.push_back(xi_k.value);
      out.xi_fallback.push_back(xi_k.fallback ? 1 : 0);
      out.dt_since_zupt.push_back(dt);
    } else {
      runtime = update_runtime(runtime, Hypothesis::Moving, sample.t);
    }

    out.times.push_back(sample.t);
    out.positions.push_back(nav.state.p);
    out.velocities.push_back(nav.state.v);
  }

  out.final_solution = nav;
  out.loop_closure_error_m = (out.positions.back() - out.positions.front()).norm();
  return out;
}

}  // namespace zupt
