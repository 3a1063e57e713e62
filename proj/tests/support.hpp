#pragma once

// Hand-rolled generators and small oracles shared by the test binaries.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Geometry>

#include "zupt/types.hpp"

namespace zupt::test {

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  double normal(double sd = 1.0) { return std::normal_distribution<double>(0.0, sd)(rng); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
  Vector3d vec(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }

  Eigen::Quaterniond rotation() {
    Eigen::Quaterniond q(normal(), normal(), normal(), normal());
    return q.normalized();
  }

  // Uniform-rate stream with random readings; gravity-ish accel keeps the
  // window mean away from zero.
  std::vector<ImuSample> stream(std::size_t n, double rate = 250.0, double accel_spread = 2.0,
                                double gyro_spread = 1.0) {
    std::vector<ImuSample> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i].t = static_cast<double>(i) / rate;
      s[i].accel = Vector3d(0, 0, 9.81) + vec(-accel_spread, accel_spread);
      s[i].gyro = vec(-gyro_spread, gyro_spread);
    }
    return s;
  }
};

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

// Defining sums of the two detector statistics with plain loops and arrays.
inline double brute_are(const std::vector<ImuSample>& w, double sigma_w) {
  double sum = 0.0;
  for (const auto& s : w) {
    for (int k = 0; k < 3; ++k) sum += s.gyro[k] * s.gyro[k];
  }
  return -0.5 * sum / (sigma_w * sigma_w);
}

inline double brute_shoe(const std::vector<ImuSample>& w, double sigma_a, double sigma_w, double g) {
  double mean[3] = {0, 0, 0};
  for (const auto& s : w) {
    for (int k = 0; k < 3; ++k) mean[k] += s.accel[k] / static_cast<double>(w.size());
  }
  const double norm = std::sqrt(mean[0] * mean[0] + mean[1] * mean[1] + mean[2] * mean[2]);
  double acc = 0.0;
  for (const auto& s : w) {
    for (int k = 0; k < 3; ++k) {
      const double d = s.accel[k] - g * mean[k] / norm;
      acc += d * d;
    }
  }
  return -0.5 * acc / (sigma_a * sigma_a) + brute_are(w, sigma_w);
}

}  // namespace zupt::test
