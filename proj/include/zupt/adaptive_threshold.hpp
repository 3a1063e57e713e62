#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "zupt/detectors.hpp"

namespace zupt {

enum class Hypothesis : unsigned char {
  Moving = 0,      // H0
  Stationary = 1,  // H1
};

enum class PriorMode { Informative, Uninformative };

PriorMode parse_prior_mode(const std::string& name);
const char* to_string(PriorMode mode);

/// Loss factor eta = max(alpha * exp(-theta * dt), floor); floor == 0 disables.
template <typename Scalar>
struct BasicLossParams {
  Scalar alpha{1};
  Scalar theta{0};
  Scalar floor{0};

  bool valid() const { return alpha > 0 && theta >= 0 && floor >= 0; }
};

/// Logistic hypothesis prior p(H1) = 1 / (1 + exp(beta1 * xi + beta2)).
template <typename Scalar>
struct BasicPriorParams {
  Scalar beta1{0};
  Scalar beta2{0};
  PriorMode mode{PriorMode::Informative};
};

/// log gamma_k = c1 + max(c2 * dt, decay_floor) + c3 * xi.
/// decay_floor is the log-domain image of the loss-factor floor
/// (floor = alpha * exp(decay_floor)); -inf disables it.
template <typename Scalar>
struct BasicThresholdParams {
  Scalar c1{0};
  Scalar c2{0};
  Scalar c3{0};
  Scalar decay_floor{-std::numeric_limits<Scalar>::infinity()};

  bool finite() const { return std::isfinite(c1) && std::isfinite(c2) && std::isfinite(c3); }
};

using LossParams = BasicLossParams<double>;
using PriorParams = BasicPriorParams<double>;
using ThresholdParams = BasicThresholdParams<double>;

/// Prior probabilities of both hypotheses. `moving` is computed directly
/// rather than as 1 - stationary so that it keeps full relative precision.
template <typename Scalar>
struct HypothesisPrior {
  Scalar stationary{0.5};
  Scalar moving{0.5};
};

template <typename Scalar>
Scalar loss_factor(const BasicLossParams<Scalar>& params, Scalar dt) {
  if (!(dt >= Scalar(0))) throw Error(ErrorKind::Contract, "loss_factor: elapsed time must be non-negative");
  using std::exp;
  using std::max;
  return max(params.alpha * exp(-params.theta * dt), params.floor);
}

template <typename Scalar>
HypothesisPrior<Scalar> hypothesis_prior(const BasicPriorParams<Scalar>& params, Scalar xi) {
  if (params.mode == PriorMode::Uninformative) return {Scalar(0.5), Scalar(0.5)};
  using std::exp;
  const Scalar x = params.beta1 * xi + params.beta2;
  return {Scalar(1) / (Scalar(1) + exp(x)), Scalar(1) / (Scalar(1) + exp(-x))};
}

template <typename Scalar>
Scalar log_threshold(const BasicThresholdParams<Scalar>& params, Scalar dt, Scalar xi) {
  if (!(dt >= Scalar(0))) throw Error(ErrorKind::Contract, "log_threshold: elapsed time must be non-negative");
  Scalar decay = params.c2 * dt;
  if (decay < params.decay_floor) decay = params.decay_floor;
  return params.c1 + decay + params.c3 * xi;
}

/// Threshold coefficients equivalent to a loss model and a prior model.
/// Exact when the loss floor is disabled.
template <typename Scalar>
BasicThresholdParams<Scalar> threshold_from_models(const BasicLossParams<Scalar>& loss,
                                                   const BasicPriorParams<Scalar>& prior) {
  using std::log;
  BasicThresholdParams<Scalar> out;
  const bool informative = prior.mode == PriorMode::Informative;
  out.c1 = (informative ? prior.beta2 : Scalar(0)) + log(loss.alpha);
  out.c2 = -loss.theta;
  out.c3 = informative ? prior.beta1 : Scalar(0);
  if (loss.floor > Scalar(0)) out.decay_floor = log(loss.floor) - log(loss.alpha);
  return out;
}

/// H1 iff log L > log gamma; equality resolves to H0.
template <typename Scalar>
Hypothesis decide(const BasicLogLikelihoodRatio<Scalar>& log_lr, Scalar log_gamma) {
  return log_lr.value > log_gamma ? Hypothesis::Stationary : Hypothesis::Moving;
}

/// Time since the last stationary decision.
struct DetectorRuntime {
  double last_zupt_time{0.0};
  double current_time{0.0};

  static DetectorRuntime starting_at(double t0) { return {t0, t0}; }
  double dt_since_zupt() const { return current_time - last_zupt_time; }
};

DetectorRuntime update_runtime(const DetectorRuntime& rt, Hypothesis decision, double t_now);

/// Empirical quantile by linear interpolation between order statistics
/// placed at plotting positions (k - 0.5) / n, clamped to the sample range.
double empirical_quantile(std::span<const double> samples, double probability);

/// Inputs to the semi-heuristic threshold selection.
struct CalibrationInputs {
  std::span<const double> stationary_log_lr;  // IMU standing perfectly still
  std::span<const double> midstance_log_lr;   // midstance of normal gait
  std::span<const double> swing_log_lr;       // swing phase
  double swing_xi_star{0.0};                  // typical xi during swing
  double dtau{0.7};                           // approximate step duration, s
  double epsilon{0.05};
  PriorMode prior{PriorMode::Informative};
};

/// Picks (c1, c2, c3) so that a fraction epsilon of stationary windows fall
/// below c1, a fraction epsilon of midstance windows fall below the threshold
/// reached after dtau, and a fraction 1 - epsilon of swing windows fall below
/// the threshold at dtau/2 with xi = xi*. A positive c2 is clamped to zero
/// with a warning, and so is c3 < 0. Uninformative prior leaves c3 = 0.
ThresholdParams calibrate(const CalibrationInputs& inputs);

/// Warnings (e.g. clamped parameters) go through this sink; stderr by default.
using WarningSink = std::function<void(std::string_view)>;
void set_warning_sink(WarningSink sink);
void warn(std::string_view message);

}  // namespace zupt
