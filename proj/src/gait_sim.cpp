#include "zupt/gait_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace zupt {

namespace {

constexpr double kPi = std::numbers::pi;

// Minimum-jerk progress s(tau) and its derivatives with respect to tau.
struct Profile1d {
  double value, d1, d2;
};

Profile1d min_jerk(double tau) {
  const double t2 = tau * tau, t3 = t2 * tau;
  return {10 * t3 - 15 * t3 * tau + 6 * t3 * t2, 30 * t2 - 60 * t3 + 30 * t2 * t2, 60 * tau - 180 * t2 + 120 * t3};
}

// Lift bump 64 tau^3 (1 - tau)^3: peak 1 at tau = 1/2, flat to second order at both ends.
Profile1d lift_bump(double tau) {
  const double u = tau * (1 - tau);
  const double w = 1 - 2 * tau;
  return {64 * u * u * u, 192 * u * u * w, 384 * u * (w * w - u)};
}

// Pitch shape sin(2 pi tau) (4 tau (1 - tau))^2: toe-off down, heel-strike up.
Profile1d pitch_shape(double tau) {
  const double u = 4 * tau * (1 - tau), du = 4 * (1 - 2 * tau), ddu = -8;
  const double s = std::sin(2 * kPi * tau), c = std::cos(2 * kPi * tau);
  return {s * u * u, 2 * kPi * c * u * u + s * 2 * u * du,
          -4 * kPi * kPi * s * u * u + 8 * kPi * c * u * du + s * (2 * du * du + 2 * u * ddu)};
}

struct FootKinematics {
  Vector3d p, v, a;
  double yaw{0}, pitch{0}, yaw_rate{0}, pitch_rate{0};
  bool still{true};
  bool walking_stance{false};
};

struct Segment {
  double t0, t1;
  bool swing;
  std::size_t from;  // stance point index (swing goes from -> from + 1)
  bool standing;     // first or last still period
};

class FootTrajectory {
 public:
  FootTrajectory(const GaitProfile& profile, double duration, PathShape path) : profile_(profile) {
    const bool walking = profile.speed > 0.0;
    if (!walking) {
      segments_.push_back({-1e9, 1e9, false, 0, true});
      points_.push_back(Vector3d::Zero());
      yaws_.push_back(0.0);
      return;
    }
    const double cycle = profile.cycle_s();
    const double stance = profile.stance_fraction * cycle;
    const double swing = cycle - stance;
    const double usable = duration - 2 * profile.standing_s + stance;
    strides_ = usable > 0 ? static_cast<std::size_t>(std::floor(usable / cycle)) : 0;
    if (strides_ < 2) throw Error(ErrorKind::Config, "duration does not cover two gait cycles");

    const double L = profile.step_length;
    if (path == PathShape::ClosedLoop) {
      const double radius = static_cast<double>(strides_) * L / (2 * kPi);
      for (std::size_t i = 0; i <= strides_; ++i) {
        const double phi = 2 * kPi * static_cast<double>(i % strides_) / static_cast<double>(strides_);
        points_.emplace_back(radius * std::sin(phi), radius * (1 - std::cos(phi)), 0.0);
        yaws_.push_back(2 * kPi * static_cast<double>(i) / static_cast<double>(strides_));
      }
      path_length_ = static_cast<double>(strides_) * 2 * radius * std::sin(kPi / static_cast<double>(strides_));
    } else {
      for (std::size_t i = 0; i <= strides_; ++i) {
        points_.emplace_back(static_cast<double>(i) * L, 0.0, 0.0);
        yaws_.push_back(0.0);
      }
      path_length_ = static_cast<double>(strides_) * L;
    }

    double t = profile.standing_s;
    segments_.push_back({-1e9, t, false, 0, true});
    for (std::size_t i = 0; i < strides_; ++i) {
      segments_.push_back({t, t + swing, true, i, false});
      t += swing;
      const bool last = i + 1 == strides_;
      segments_.push_back({t, last ? 1e9 : t + stance, false, i + 1, last});
      t += stance;
    }
  }

  FootKinematics at(double t) const {
    const auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                                     [](double value, const Segment& s) { return value < s.t1; });
    const Segment& seg = it == segments_.end() ? segments_.back() : *it;
    FootKinematics k;
    if (!seg.swing) {
      k.p = points_[seg.from];
      k.v.setZero();
      k.a.setZero();
      k.yaw = yaws_[seg.from];
      k.still = true;
      k.walking_stance = !seg.standing;
      return k;
    }
    const double T = seg.t1 - seg.t0;
    const double tau = std::clamp((t - seg.t0) / T, 0.0, 1.0);
    const Vector3d delta = points_[seg.from + 1] - points_[seg.from];
    const double dyaw = yaws_[seg.from + 1] - yaws_[seg.from];
    const auto s = min_jerk(tau);
    const auto b = lift_bump(tau);
    const auto g = pitch_shape(tau);
    const double h = profile_.foot_lift_m;
    const Vector3d up = Vector3d::UnitZ();

    k.p = points_[seg.from] + delta * s.value + up * (h * b.value);
    k.v = (delta * s.d1 + up * (h * b.d1)) / T;
    k.a = (delta * s.d2 + up * (h * b.d2)) / (T * T);
    k.yaw = yaws_[seg.from] + dyaw * s.value;
    k.yaw_rate = dyaw * s.d1 / T;
    k.pitch = profile_.pitch_amplitude_rad * g.value;
    k.pitch_rate = profile_.pitch_amplitude_rad * g.d1 / T;
    k.still = false;
    return k;
  }

  /// True when the foot does not move anywhere in [t0, t1].
  bool still_over(double t0, double t1) const {
    const auto it = std::upper_bound(segments_.begin(), segments_.end(), t0,
                                     [](double value, const Segment& s) { return value < s.t1; });
    if (it == segments_.end()) return !segments_.back().swing;
    return !it->swing && t1 <= it->t1;
  }

  std::size_t strides() const { return strides_; }
  double path_length() const { return path_length_; }

 private:
  GaitProfile profile_;
  std::vector<Segment> segments_;
  std::vector<Vector3d> points_;
  std::vector<double> yaws_;
  std::size_t strides_{0};
  double path_length_{0.0};
};

Eigen::Quaterniond attitude(double yaw, double pitch) {
  return Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Vector3d::UnitZ()) * Eigen::AngleAxisd(pitch, Vector3d::UnitY()));
}

}  // namespace

GaitProfile GaitProfile::normal_gait() {
  GaitProfile p;
  return p;
}

GaitProfile GaitProfile::fast_gait() {
  GaitProfile p;
  p.speed = 7.0 / 3.6;
  p.step_length = 1.6;
  p.cadence = p.speed / p.step_length;
  p.stance_fraction = 0.32;
  p.foot_lift_m = 0.15;
  p.pitch_amplitude_rad = 0.8;
  p.stance_vibration_a = 0.35;
  p.stance_vibration_w = 0.05;
  return p;
}

GaitProfile GaitProfile::standing() {
  GaitProfile p;
  p.speed = 0.0;
  return p;
}

void GaitProfile::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::Config, "gait profile: " + what); };
  require_valid(noise);
  if (!(sample_rate > 0)) bad("sample_rate must be positive");
  if (!(speed >= 0)) bad("speed must be non-negative");
  if (!(standing_s >= 0)) bad("standing_s must be non-negative");
  if (!(stance_vibration_a >= 0 && stance_vibration_w >= 0)) bad("vibration levels must be non-negative");
  if (speed == 0.0) return;
  if (!(step_length > 0 && cadence > 0)) bad("step_length and cadence must be positive");
  if (!(stance_fraction > 0 && stance_fraction < 1)) bad("stance_fraction must lie in (0, 1)");
  if (std::abs(step_length * cadence - speed) > 0.1 * speed) bad("speed must match step_length * cadence within 10%");
  const double dt = 1.0 / sample_rate;
  if (stance_fraction * cycle_s() < 2 * dt) bad("stance phase shorter than two samples");
  if ((1 - stance_fraction) * cycle_s() < 2 * dt) bad("swing phase shorter than two samples");
}

PathShape parse_path_shape(const std::string& name) {
  if (name == "loop" || name == "closed-loop") return PathShape::ClosedLoop;
  if (name == "straight") return PathShape::Straight;
  throw Error(ErrorKind::Config, "unknown path '" + name + "' (expected loop|straight)");
}

LabeledRecording simulate(const GaitProfile& profile, double duration_s, PathShape path) {
  profile.validate();
  if (!(duration_s > 0)) throw Error(ErrorKind::Config, "duration must be positive");
  const FootTrajectory traj(profile, duration_s, path);

  const double dt = 1.0 / profile.sample_rate;
  const auto n = static_cast<std::size_t>(std::floor(duration_s * profile.sample_rate)) + 1;
  const Vector3d gravity(0.0, 0.0, -profile.noise.gravity_mag);

  std::mt19937_64 rng(profile.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  auto gaussian3 = [&](double sigma) { return Vector3d(sigma * unit(rng), sigma * unit(rng), sigma * unit(rng)); };

  LabeledRecording rec;
  rec.stream.reserve(n);
  rec.stationary.reserve(n);
  rec.true_positions.reserve(n);
  rec.true_velocities.reserve(n);
  rec.strides = traj.strides();
  rec.path_length_m = traj.path_length();
  {
    const auto k0 = traj.at(0.0);
    rec.initial_attitude = attitude(k0.yaw, k0.pitch);
  }

  // Each sample holds the constant rate and specific force that carry the
  // true state from t - dt to t under the strapdown step, so a noiseless
  // replay is exact up to the position quadrature.
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const auto before = traj.at(t - dt);
    const auto now = traj.at(t);
    const auto mid = traj.at(t - dt / 2);
    const Eigen::Quaterniond q0 = attitude(before.yaw, before.pitch);
    Eigen::Quaterniond dq = q0.conjugate() * attitude(now.yaw, now.pitch);
    if (dq.w() < 0) dq.coeffs() = -dq.coeffs();
    const Eigen::AngleAxisd rot(dq);
    const Vector3d phi = rot.axis() * rot.angle();
    const Eigen::Quaterniond q_mid = q0 * rotation_vector_to_quaternion<double>(phi / 2);

    ImuSample s;
    s.t = t;
    s.gyro = phi / dt;
    s.accel = q_mid.conjugate() * ((now.v - before.v) / dt - gravity);
    if (profile.add_noise) {
      s.accel += gaussian3(profile.noise.sigma_a);
      s.gyro += gaussian3(profile.noise.sigma_w);
      if (mid.walking_stance) {
        s.accel += gaussian3(profile.stance_vibration_a);
        s.gyro += gaussian3(profile.stance_vibration_w);
      }
    }

    rec.stream.push_back(s);
    rec.stationary.push_back(traj.still_over(t - dt, t) ? 1 : 0);
    rec.true_positions.push_back(now.p);
    rec.true_velocities.push_back(now.v);
  }
  return rec;
}

CalibrationSets extract_calibration_sets(std::span<const ImuSample> stream, std::span<const std::uint8_t> stationary,
                                         const PipelineConfig& config) {
  if (stationary.size() != stream.size()) throw Error(ErrorKind::Config, "labels and stream lengths differ");
  const std::size_t N = config.window_samples;
  const std::size_t n = stream.size();
  if (n < N) throw Error(ErrorKind::EmptyStream, "stream shorter than one detector window");

  struct Interval {
    std::size_t first, last;
  };
  std::vector<Interval> still;
  for (std::size_t k = 0; k < n;) {
    if (!stationary[k]) {
      ++k;
      continue;
    }
    std::size_t j = k;
    while (j + 1 < n && stationary[j + 1]) ++j;
    still.push_back({k, j});
    k = j + 1;
  }

  CalibrationSets sets;
  for (const auto& iv : still) {
    const bool standing = iv.first == 0 || iv.last == n - 1;
    const std::size_t len = iv.last - iv.first + 1;
    if (len < N) continue;
    if (standing) {
      for (std::size_t s = iv.first; s + N - 1 <= iv.last; ++s) sets.stationary_windows.push_back(s);
    } else {
      sets.midstance_windows.push_back(iv.first + (len - N) / 2);
    }
  }
  std::size_t run = 0;
  for (std::size_t k = 0; k < n; ++k) {
    run = stationary[k] ? 0 : run + 1;
    if (run >= N) sets.swing_windows.push_back(k + 1 - N);
  }
  if (sets.stationary_windows.empty()) throw Error(ErrorKind::CalibrationData, "no standing-still windows in recording");
  if (sets.midstance_windows.empty()) throw Error(ErrorKind::CalibrationData, "no walking stance long enough for a window");
  if (sets.swing_windows.empty()) throw Error(ErrorKind::CalibrationData, "no swing windows in recording");

  PipelineConfig reference = config;
  reference.mode = ThresholdMode::Labels;
  const auto run_result = run_pipeline(stream, reference, std::nullopt, stationary);

  // Trace entry i belongs to the window that ends at sample i + N - 1, i.e.
  // the window starting at i.
  auto collect = [&](const std::vector<std::size_t>& starts, std::vector<double>& out) {
    out.reserve(starts.size());
    for (auto s : starts) out.push_back(run_result.log_lr[s]);
  };
  collect(sets.stationary_windows, sets.stationary_log_lr);
  collect(sets.midstance_windows, sets.midstance_log_lr);
  collect(sets.swing_windows, sets.swing_log_lr);

  std::vector<double> swing_xi;
  swing_xi.reserve(sets.swing_windows.size());
  for (auto s : sets.swing_windows) swing_xi.push_back(run_result.xi[s]);
  const auto mid = swing_xi.begin() + static_cast<std::ptrdiff_t>(swing_xi.size() / 2);
  std::nth_element(swing_xi.begin(), mid, swing_xi.end());
  sets.xi_star = *mid;
  return sets;
}

}  // namespace zupt
