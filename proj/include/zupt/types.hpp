#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "zupt/error.hpp"

namespace zupt {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

/// One IMU reading. `accel` is specific force in m/s^2 and `gyro` angular
/// rate in rad/s, both in the sensor (body) frame. The reading at `t` is
/// taken to represent the interval ending at `t`.
template <typename Scalar>
struct BasicImuSample {
  Scalar t{0};
  Vec3<Scalar> accel{Vec3<Scalar>::Zero()};
  Vec3<Scalar> gyro{Vec3<Scalar>::Zero()};

  bool finite() const {
    return std::isfinite(t) && accel.allFinite() && gyro.allFinite();
  }
};

/// A view of N consecutive samples starting at stream index `start_index`.
/// Non-owning: the stream must outlive the window.
template <typename Scalar>
struct BasicImuWindow {
  std::span<const BasicImuSample<Scalar>> samples;
  std::size_t start_index{0};

  std::size_t size() const { return samples.size(); }
  std::size_t end_index() const { return start_index + samples.size() - 1; }
};

/// Sensor noise assumptions shared by the detectors and the filter.
template <typename Scalar>
struct BasicNoiseModel {
  Scalar sigma_a{0.05};       // accelerometer white noise std, m/s^2
  Scalar sigma_w{0.004};      // gyroscope white noise std, rad/s
  Scalar gravity_mag{9.81};   // m/s^2
  Scalar sigma_zupt{0.01};    // zero-velocity pseudo-measurement std, m/s

  bool valid() const {
    return sigma_a > 0 && sigma_w > 0 && gravity_mag > 0 && sigma_zupt > 0 &&
           std::isfinite(sigma_a) && std::isfinite(sigma_w) && std::isfinite(gravity_mag) &&
           std::isfinite(sigma_zupt);
  }
};

using ImuSample = BasicImuSample<double>;
using ImuWindow = BasicImuWindow<double>;
using NoiseModel = BasicNoiseModel<double>;
using ImuStream = std::vector<ImuSample>;

using Vector3d = Vec3<double>;
using Matrix3d = Mat3<double>;

inline void require_valid(const NoiseModel& noise) {
  if (!noise.valid()) throw Error(ErrorKind::Config, "noise model parameters must be finite and strictly positive");
}

}  // namespace zupt
