#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "zupt/adaptive_threshold.hpp"
#include "zupt/detectors.hpp"
#include "zupt/ins.hpp"

namespace zupt {

/// How the pipeline turns log L into a decision.
enum class ThresholdMode {
  Adaptive,  // log gamma_k = c1 + c2 dt_k + c3 xi_k
  Fixed,     // classical likelihood-ratio test against a constant log gamma
  Labels,    // ground-truth stationarity labels (reference runs only)
};

ThresholdMode parse_threshold_mode(const std::string& name);
const char* to_string(ThresholdMode mode);

/// One-sigma initial uncertainties.
struct InitialUncertainty {
  double position_m{1e-5};
  double velocity_mps{0.01};
  double roll_pitch_rad{0.5 * 3.14159265358979323846 / 180.0};
  double yaw_rad{0.1 * 3.14159265358979323846 / 180.0};
};

struct PipelineConfig {
  std::size_t window_samples{5};
  DetectorKind detector{DetectorKind::Shoe};
  NoiseModel noise{};
  ProcessNoise process{};

  ThresholdMode mode{ThresholdMode::Adaptive};
  // Calibrated on simulated normal gait (epsilon 0.05, dtau 0.7 s).
  ThresholdParams threshold{-20.43, -459.3, 0.0};
  PriorMode prior{PriorMode::Informative};
  double fixed_log_gamma{0.0};

  double xi_max_condition{1e10};
  double alignment_s{1.0};
  InitialUncertainty initial{};

  /// Overrides `detector` when set.
  DetectorFn custom_detector{};
};

/// Per-sample and per-window output of one run. Detection traces start at
/// sample `first_window_index` (= window_samples - 1); entry i of a trace
/// belongs to sample first_window_index + i.
struct PipelineResult {
  std::vector<double> times;
  std::vector<Vector3d> positions;
  std::vector<Vector3d> velocities;

  std::size_t first_window_index{0};
  std::vector<Hypothesis> decisions;
  std::vector<double> log_lr;
  std::vector<double> log_gamma;
  std::vector<double> xi;
  std::vector<unsigned char> xi_fallback;
  std::vector<double> dt_since_zupt;

  NavSolution final_solution;
  std::size_t zupt_count{0};
  double loop_closure_error_m{0.0};
};

/// Roll and pitch from the mean specific force over the first `alignment_s`
/// seconds (at least one sample); heading zero, position and velocity zero.
NavSolution initial_alignment(std::span<const ImuSample> stream, const PipelineConfig& config);

/// Runs propagate -> detect -> (optional) zero-velocity update over every
/// sample. The detector window is causal (ends at the current sample); xi is
/// taken from the covariance before any update at that sample. With the
/// Labels mode, `labels` (one per sample) replaces the detector decision.
PipelineResult run_pipeline(std::span<const ImuSample> stream, const PipelineConfig& config,
                            const std::optional<NavSolution>& init = std::nullopt,
                            std::span<const std::uint8_t> labels = {});

}  // namespace zupt
