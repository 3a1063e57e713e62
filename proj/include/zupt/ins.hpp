#pragma once

#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include "zupt/types.hpp"

namespace zupt {

template <typename Scalar>
using Mat9 = Eigen::Matrix<Scalar, 9, 9>;

/// Offsets of the error-state blocks [dp, dv, dpsi].
inline constexpr int kPos = 0;
inline constexpr int kVel = 3;
inline constexpr int kAtt = 6;

/// Nominal strapdown state in a z-up navigation frame. `q` rotates body
/// vectors into the navigation frame.
template <typename Scalar>
struct BasicNavState {
  Vec3<Scalar> p{Vec3<Scalar>::Zero()};
  Vec3<Scalar> v{Vec3<Scalar>::Zero()};
  Eigen::Quaternion<Scalar> q{Eigen::Quaternion<Scalar>::Identity()};
};

/// Nominal state plus the 9x9 error covariance. Attitude errors are small
/// rotations expressed in the navigation frame: R_true = (I + [dpsi]x) R.
template <typename Scalar>
struct BasicNavSolution {
  BasicNavState<Scalar> state;
  Mat9<Scalar> P{Mat9<Scalar>::Zero()};

  Mat3<Scalar> velocity_covariance() const { return P.template block<3, 3>(kVel, kVel); }
};

/// White-noise densities driving the error covariance.
template <typename Scalar>
struct BasicProcessNoise {
  Scalar accel_psd{0.01};    // m/s^2 / sqrt(Hz)
  Scalar gyro_psd{0.0008};   // rad/s / sqrt(Hz)

  bool valid() const { return accel_psd > 0 && gyro_psd > 0; }
};

using NavState = BasicNavState<double>;
using NavSolution = BasicNavSolution<double>;
using ProcessNoise = BasicProcessNoise<double>;
using Matrix9d = Mat9<double>;

template <typename Scalar>
Mat3<Scalar> skew(const Vec3<Scalar>& w) {
  Mat3<Scalar> m;
  m << Scalar(0), -w.z(), w.y(),
       w.z(), Scalar(0), -w.x(),
       -w.y(), w.x(), Scalar(0);
  return m;
}

/// Unit quaternion of the rotation vector `phi` (exact exponential map).
template <typename Scalar>
Eigen::Quaternion<Scalar> rotation_vector_to_quaternion(const Vec3<Scalar>& phi) {
  using std::cos;
  using std::sin;
  const Scalar angle = phi.norm();
  if (angle < Scalar(1e-12)) {
    Eigen::Quaternion<Scalar> q(Scalar(1), phi.x() / 2, phi.y() / 2, phi.z() / 2);
    return q.normalized();
  }
  const Vec3<Scalar> axis = phi / angle;
  const Scalar s = sin(angle / 2);
  return Eigen::Quaternion<Scalar>(cos(angle / 2), s * axis.x(), s * axis.y(), s * axis.z());
}

template <typename Scalar>
Vec3<Scalar> gravity_vector(const BasicNoiseModel<Scalar>& noise) {
  return Vec3<Scalar>(Scalar(0), Scalar(0), -noise.gravity_mag);
}

/// Strapdown step over the interval of length `dt` that ends at the sample.
/// Attitude is integrated with the exact exponential of w*dt; specific force
/// is rotated with the attitude at the interval midpoint; position uses the
/// mean of the old and new velocity. The covariance goes through the
/// linearised error dynamics.
template <typename Scalar>
BasicNavSolution<Scalar> propagate(const BasicNavSolution<Scalar>& nav, const BasicImuSample<Scalar>& sample,
                                   Scalar dt, const BasicNoiseModel<Scalar>& noise,
                                   const BasicProcessNoise<Scalar>& pn) {
  if (!(dt > Scalar(0))) throw Error(ErrorKind::Contract, "propagate: dt must be positive");

  const auto& x = nav.state;
  const Vec3<Scalar> half_rot = sample.gyro * (dt / 2);
  const Eigen::Quaternion<Scalar> q_mid = (x.q * rotation_vector_to_quaternion(half_rot)).normalized();
  const Eigen::Quaternion<Scalar> q_new = (q_mid * rotation_vector_to_quaternion(half_rot)).normalized();

  const Vec3<Scalar> f_nav = q_mid * sample.accel;
  BasicNavSolution<Scalar> out;
  out.state.q = q_new;
  out.state.v = x.v + (f_nav + gravity_vector(noise)) * dt;
  out.state.p = x.p + (x.v + out.state.v) * (dt / 2);

  Mat9<Scalar> F = Mat9<Scalar>::Identity();
  const Mat3<Scalar> f_skew = skew(f_nav);
  F.template block<3, 3>(kPos, kVel) = Mat3<Scalar>::Identity() * dt;
  F.template block<3, 3>(kPos, kAtt) = -f_skew * (dt * dt / 2);
  F.template block<3, 3>(kVel, kAtt) = -f_skew * dt;

  Mat9<Scalar> Q = Mat9<Scalar>::Zero();
  Q.template block<3, 3>(kVel, kVel) = Mat3<Scalar>::Identity() * (pn.accel_psd * pn.accel_psd * dt);
  Q.template block<3, 3>(kAtt, kAtt) = Mat3<Scalar>::Identity() * (pn.gyro_psd * pn.gyro_psd * dt);

  out.P = F * nav.P * F.transpose() + Q;
  out.P = ((out.P + out.P.transpose()) / 2).eval();
  return out;
}

/// Zero-velocity pseudo-measurement update (z = -v, H = [0 I 0],
/// R = sigma_zupt^2 I) with the error folded back into the nominal state and
/// a Joseph-form covariance update.
template <typename Scalar>
BasicNavSolution<Scalar> zupt_update(const BasicNavSolution<Scalar>& nav, const BasicNoiseModel<Scalar>& noise) {
  using Mat39 = Eigen::Matrix<Scalar, 3, 9>;
  using Mat93 = Eigen::Matrix<Scalar, 9, 3>;

  Mat39 H = Mat39::Zero();
  H.template block<3, 3>(0, kVel).setIdentity();
  const Mat3<Scalar> R = Mat3<Scalar>::Identity() * (noise.sigma_zupt * noise.sigma_zupt);

  const Mat3<Scalar> S = H * nav.P * H.transpose() + R;
  const Eigen::LDLT<Mat3<Scalar>> ldlt(S);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !(ldlt.vectorD().minCoeff() > Scalar(0))) {
    std::ostringstream msg;
    msg << "zupt_update: innovation covariance is not invertible:\n" << S;
    throw Error(ErrorKind::Numerical, msg.str());
  }
  const Mat93 K = ldlt.solve(H * nav.P).transpose();
  const Vec3<Scalar> innovation = -nav.state.v;
  const Eigen::Matrix<Scalar, 9, 1> dx = K * innovation;

  BasicNavSolution<Scalar> out;
  out.state.p = nav.state.p + dx.template segment<3>(kPos);
  out.state.v = nav.state.v + dx.template segment<3>(kVel);
  const Vec3<Scalar> dpsi = dx.template segment<3>(kAtt);
  out.state.q = (rotation_vector_to_quaternion(dpsi) * nav.state.q).normalized();

  const Mat9<Scalar> I_KH = Mat9<Scalar>::Identity() - K * H;
  out.P = I_KH * nav.P * I_KH.transpose() + K * R * K.transpose();
  out.P = ((out.P + out.P.transpose()) / 2).eval();
  return out;
}

/// Velocity significance xi = v^T S^-1 v, or a fallback flag when the
/// velocity covariance is not safely invertible.
template <typename Scalar>
struct XiResult {
  Scalar value{0};
  bool fallback{false};
};

template <typename Scalar>
XiResult<Scalar> velocity_significance(const Vec3<Scalar>& v, const Mat3<Scalar>& S,
                                       Scalar max_condition = Scalar(1e10)) {
  const Eigen::SelfAdjointEigenSolver<Mat3<Scalar>> eig(S, Eigen::EigenvaluesOnly);
  const Scalar lo = eig.eigenvalues().minCoeff();
  const Scalar hi = eig.eigenvalues().maxCoeff();
  if (eig.info() != Eigen::Success || !(lo > Scalar(0)) || hi / lo > max_condition) return {Scalar(0), true};
  const Vec3<Scalar> x = S.ldlt().solve(v);
  const Scalar xi = v.dot(x);
  return {xi > Scalar(0) ? xi : Scalar(0), false};
}

template <typename Scalar>
XiResult<Scalar> xi(const BasicNavSolution<Scalar>& nav, Scalar max_condition = Scalar(1e10)) {
  return velocity_significance<Scalar>(nav.state.v, nav.velocity_covariance(), max_condition);
}

/// Symmetric within `sym_tol` relative and min eigenvalue >= -psd_tol * trace.
template <typename Scalar>
bool is_symmetric_psd(const Mat9<Scalar>& P, Scalar sym_tol = Scalar(1e-9), Scalar psd_tol = Scalar(1e-12)) {
  const Scalar scale = P.cwiseAbs().maxCoeff();
  if (!P.allFinite()) return false;
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > sym_tol * (scale > Scalar(0) ? scale : Scalar(1))) return false;
  const Eigen::SelfAdjointEigenSolver<Mat9<Scalar>> eig(P, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -psd_tol * P.trace();
}

}  // namespace zupt
