#pragma once

#include <functional>
#include <optional>
#include <string>

#include "zupt/types.hpp"

namespace zupt {

/// log L(z_n) for the window starting at stream index `window_index`.
/// Larger (less negative) values favour the stationary hypothesis.
template <typename Scalar>
struct BasicLogLikelihoodRatio {
  Scalar value{0};
  std::size_t window_index{0};
};

using LogLikelihoodRatio = BasicLogLikelihoodRatio<double>;

/// The two noise-normalised energies that make up the stance-hypothesis
/// statistic. Both are <= 0; their sum is log L.
template <typename Scalar>
struct ShoeTerms {
  Scalar accel_term{0};
  Scalar gyro_term{0};
  Vec3<Scalar> gravity_direction{Vec3<Scalar>::UnitZ()};

  Scalar total() const { return accel_term + gyro_term; }
};

template <typename Scalar>
Scalar gyro_energy_term(const BasicImuWindow<Scalar>& window, const BasicNoiseModel<Scalar>& noise) {
  Scalar sum{0};
  for (const auto& s : window.samples) sum += s.gyro.squaredNorm();
  return Scalar(-0.5) * sum / (noise.sigma_w * noise.sigma_w);
}

/// Window-mean specific force direction. Empty if the mean is the zero vector.
template <typename Scalar>
std::optional<Vec3<Scalar>> mean_accel_direction(const BasicImuWindow<Scalar>& window) {
  Vec3<Scalar> mean = Vec3<Scalar>::Zero();
  for (const auto& s : window.samples) mean += s.accel;
  mean /= static_cast<Scalar>(window.size());
  const Scalar norm = mean.norm();
  if (!(norm > Scalar(0))) return std::nullopt;
  return Vec3<Scalar>(mean / norm);
}

/// Stance-hypothesis statistic split into its accelerometer and gyroscope
/// parts:
///   log L = -1/2 sum_k ( |a_k - g u|^2 / sigma_a^2 + |w_k|^2 / sigma_w^2 )
/// with u the direction of the window-mean specific force. When the mean is
/// zero, `fallback_direction` (typically the previous window's u) is used if
/// given, otherwise DegenerateWindow is thrown.
template <typename Scalar>
ShoeTerms<Scalar> shoe_terms(const BasicImuWindow<Scalar>& window, const BasicNoiseModel<Scalar>& noise,
                             const std::optional<Vec3<Scalar>>& fallback_direction = std::nullopt) {
  if (window.size() == 0) throw Error(ErrorKind::EmptyStream, "empty detector window");
  auto direction = mean_accel_direction(window);
  if (!direction) {
    if (!fallback_direction) {
      throw Error(ErrorKind::DegenerateWindow,
                  "zero mean specific force in window starting at " + std::to_string(window.start_index));
    }
    direction = fallback_direction;
  }
  const Vec3<Scalar> expected = noise.gravity_mag * (*direction);
  Scalar accel_sum{0};
  for (const auto& s : window.samples) accel_sum += (s.accel - expected).squaredNorm();

  ShoeTerms<Scalar> terms;
  terms.accel_term = Scalar(-0.5) * accel_sum / (noise.sigma_a * noise.sigma_a);
  terms.gyro_term = gyro_energy_term(window, noise);
  terms.gravity_direction = *direction;
  return terms;
}

template <typename Scalar>
BasicLogLikelihoodRatio<Scalar> shoe_log_lr(const BasicImuWindow<Scalar>& window,
                                            const BasicNoiseModel<Scalar>& noise) {
  return {shoe_terms(window, noise).total(), window.start_index};
}

/// Angular-rate energy statistic: log L = -1/2 sum_k |w_k|^2 / sigma_w^2.
template <typename Scalar>
BasicLogLikelihoodRatio<Scalar> are_log_lr(const BasicImuWindow<Scalar>& window,
                                           const BasicNoiseModel<Scalar>& noise) {
  if (window.size() == 0) throw Error(ErrorKind::EmptyStream, "empty detector window");
  return {gyro_energy_term(window, noise), window.start_index};
}

enum class DetectorKind { Shoe, AngularRateEnergy };

inline DetectorKind parse_detector_kind(const std::string& name) {
  if (name == "shoe") return DetectorKind::Shoe;
  if (name == "are") return DetectorKind::AngularRateEnergy;
  throw Error(ErrorKind::Config, "unknown detector '" + name + "' (expected shoe|are)");
}

inline const char* to_string(DetectorKind kind) {
  return kind == DetectorKind::Shoe ? "shoe" : "are";
}

/// Any statistic of the form (window, noise) -> log L can drive the pipeline.
using DetectorFn = std::function<LogLikelihoodRatio(const ImuWindow&, const NoiseModel&)>;

inline DetectorFn make_detector(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::Shoe:
      return [](const ImuWindow& w, const NoiseModel& n) { return shoe_log_lr(w, n); };
    case DetectorKind::AngularRateEnergy:
      return [](const ImuWindow& w, const NoiseModel& n) { return are_log_lr(w, n); };
  }
  throw Error(ErrorKind::Config, "unknown detector kind");
}

}  // namespace zupt
