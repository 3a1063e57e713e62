#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zupt/pipeline.hpp"

namespace zupt {

/// Foot-mounted walking profile. One gait cycle is one stride of the
/// instrumented foot: a swing that advances it by `step_length`, then a
/// stance. `cadence` counts these cycles per second.
struct GaitProfile {
  double speed{5.0 / 3.6};        // m/s
  double step_length{1.4};        // m per cycle
  double stance_fraction{0.4};    // of the cycle
  double cadence{0.992};          // cycles per second
  double sample_rate{250.0};      // Hz
  NoiseModel noise{};             // sensor white noise and gravity
  std::uint64_t seed{1};

  double standing_s{2.0};             // still periods at start and end
  double foot_lift_m{0.12};           // peak swing height
  double pitch_amplitude_rad{0.6};    // peak foot pitch during swing
  double stance_vibration_a{0.15};    // extra accel noise std during walking stances, m/s^2
  double stance_vibration_w{0.02};    // extra gyro noise std during walking stances, rad/s
  bool add_noise{true};

  static GaitProfile normal_gait();    // about 5 km/h
  static GaitProfile fast_gait();      // about 7 km/h
  static GaitProfile standing();       // zero speed

  /// Throws Error(Config) when a field is out of range or the profile cannot
  /// be sampled (a phase shorter than two samples).
  void validate() const;
  double cycle_s() const { return 1.0 / cadence; }
};

enum class PathShape { ClosedLoop, Straight };

PathShape parse_path_shape(const std::string& name);

/// Simulated stream with exact ground truth. Sample k carries the ideal
/// signals at the midpoint of the interval ending at t_k (plus noise);
/// `stationary[k]` is true when the foot is still over that whole interval.
struct LabeledRecording {
  std::vector<ImuSample> stream;
  std::vector<std::uint8_t> stationary;  // 1 = still
  std::vector<Vector3d> true_positions;    // at t_k
  std::vector<Vector3d> true_velocities;   // at t_k
  Eigen::Quaterniond initial_attitude{Eigen::Quaterniond::Identity()};
  std::size_t strides{0};
  double path_length_m{0.0};
  std::string gait_tag;
};

LabeledRecording simulate(const GaitProfile& profile, double duration_s, PathShape path);

/// Window start indices and their statistics for threshold calibration.
struct CalibrationSets {
  std::vector<std::size_t> stationary_windows;  // inside the standing periods
  std::vector<std::size_t> midstance_windows;   // centred in each walking stance
  std::vector<std::size_t> swing_windows;       // entirely in swing
  std::vector<double> stationary_log_lr;
  std::vector<double> midstance_log_lr;
  std::vector<double> swing_log_lr;
  double xi_star{0.0};  // median xi over swing windows from a label-driven run
};

/// Labels are one flag per sample (1 = still). Stationary intervals that touch the
/// start or end of the recording are standing periods; all others are
/// walking stances.
CalibrationSets extract_calibration_sets(std::span<const ImuSample> stream,
                                         std::span<const std::uint8_t> stationary, const PipelineConfig& config);

inline CalibrationSets extract_calibration_sets(const LabeledRecording& rec, const PipelineConfig& config) {
  return extract_calibration_sets(rec.stream, rec.stationary, config);
}

}  // namespace zupt
