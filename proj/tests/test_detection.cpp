#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>

#include "support.hpp"
#include "zupt/adaptive_threshold.hpp"
#include "zupt/detectors.hpp"
#include "zupt/windowing.hpp"

using namespace zupt;
using zupt::test::Gen;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected zupt::Error");
  return ErrorKind::Contract;
}

}  // namespace

TEST_CASE("sliding windows cover the stream causally") {
  Gen g(1);
  const auto s = g.stream(12);
  const auto w = sliding_windows(s, 5);
  REQUIRE(w.size() == 8);
  CHECK(w.front().start_index == 0);
  CHECK(w.back().end_index() == 11);
  for (const auto& win : w) CHECK(win.size() == 5);
  CHECK(window_ending_at(s, 7, 5).start_index == 3);
}

TEST_CASE("window of one sample") {
  Gen g(2);
  const auto s = g.stream(3);
  CHECK(sliding_windows(s, 1).size() == 3);
}

TEST_CASE("stream shorter than the window is an empty-stream error") {
  Gen g(3);
  const auto s = g.stream(4);
  CHECK(kind_of([&] { sliding_windows(s, 5); }) == ErrorKind::EmptyStream);
}

TEST_CASE("shuffled timestamps are rejected with the offending index") {
  Gen g(4);
  auto s = g.stream(10);
  std::swap(s[6].t, s[7].t);
  const auto d = validate_stream(s);
  CHECK_FALSE(d.ok);
  REQUIRE(d.first_offending_index);
  CHECK(*d.first_offending_index == 7);
  CHECK(kind_of([&] { require_valid_stream(s); }) == ErrorKind::Format);

  s = g.stream(10);
  s[3].gyro.x() = std::numeric_limits<double>::quiet_NaN();
  CHECK(*validate_stream(s).first_offending_index == 3);
}

TEST_CASE("median period and window length from milliseconds") {
  Gen g(5);
  const auto s = g.stream(100, 250.0);
  CHECK(median_period(s) == doctest::Approx(0.004));
  CHECK(window_samples_from_ms(20.0, 0.004) == 5);
  CHECK(window_samples_from_ms(1.0, 0.004) == 1);
}

TEST_CASE("detector statistics match their defining sums") {
  Gen g(6);
  const NoiseModel noise{};
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = g.stream(5, 250.0, g.uniform(0.01, 5.0), g.uniform(0.001, 3.0));
    const ImuWindow w{s, 0};
    CHECK(test::rel_err(shoe_log_lr(w, noise).value, test::brute_shoe(s, noise.sigma_a, noise.sigma_w, 9.81)) < 1e-12);
    CHECK(test::rel_err(are_log_lr(w, noise).value, test::brute_are(s, noise.sigma_w)) < 1e-12);
  }
}

TEST_CASE("statistics are non-positive and zero only for an ideal still window") {
  std::vector<ImuSample> s(5);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i].t = 0.004 * static_cast<double>(i);
    s[i].accel = Vector3d(0, 0, 9.81);
    s[i].gyro.setZero();
  }
  const ImuWindow w{s, 0};
  CHECK(shoe_log_lr(w, NoiseModel{}).value == doctest::Approx(0.0).epsilon(1e-15));
  s[2].gyro.x() = 0.01;
  CHECK(shoe_log_lr(w, NoiseModel{}).value < 0.0);
  CHECK(are_log_lr(w, NoiseModel{}).value < 0.0);
}

TEST_CASE("zero mean specific force is degenerate unless a fallback direction exists") {
  std::vector<ImuSample> s(4);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i].t = 0.004 * static_cast<double>(i);
    s[i].accel = Vector3d(i % 2 ? 1.0 : -1.0, 0, 0);
    s[i].gyro.setZero();
  }
  const ImuWindow w{s, 0};
  CHECK(kind_of([&] { shoe_terms(w, NoiseModel{}); }) == ErrorKind::DegenerateWindow);
  const auto terms = shoe_terms(w, NoiseModel{}, std::optional<Vector3d>(Vector3d(0, 0, 1)));
  CHECK(terms.accel_term == doctest::Approx(-0.5 * 4 * (1 + 9.81 * 9.81) / (0.05 * 0.05)));
}

TEST_CASE("detector factory and parsing") {
  CHECK(parse_detector_kind("shoe") == DetectorKind::Shoe);
  CHECK(parse_detector_kind("are") == DetectorKind::AngularRateEnergy);
  CHECK(kind_of([] { parse_detector_kind("amv"); }) == ErrorKind::Config);
  Gen g(7);
  const auto s = g.stream(5);
  const ImuWindow w{s, 0};
  CHECK(make_detector(DetectorKind::AngularRateEnergy)(w, NoiseModel{}).value == are_log_lr(w, NoiseModel{}).value);
}

TEST_CASE("threshold equals the Bayes-risk form for random model parameters") {
  Gen g(8);
  for (int trial = 0; trial < 2000; ++trial) {
    const LossParams loss{g.uniform(1e-3, 1e3), g.uniform(0.0, 10.0), 0.0};
    const PriorParams prior{g.uniform(-5.0, 5.0), g.uniform(-20.0, 20.0), PriorMode::Informative};
    const double dt = g.uniform(0.0, 5.0);
    const double xi = g.uniform(0.0, 4.0);

    // Direct evaluation with each probability formed separately so neither
    // side cancels catastrophically.
    const double x = prior.beta1 * xi + prior.beta2;
    const double p1 = 1.0 / (1.0 + std::exp(x));
    const double p0 = std::exp(x) / (1.0 + std::exp(x));
    const double direct = std::log(p0) - std::log(p1) + std::log(loss.alpha * std::exp(-loss.theta * dt));

    const auto params = threshold_from_models(loss, prior);
    CHECK(std::abs(log_threshold(params, dt, xi) - direct) < 1e-12);

    const auto hp = hypothesis_prior(prior, xi);
    CHECK(std::abs(std::log(hp.moving / hp.stationary * loss_factor(loss, dt)) - direct) < 1e-10);
  }
}

TEST_CASE("uninformative prior drops the xi term") {
  const auto p = threshold_from_models(LossParams{2.0, 3.0, 0.0}, PriorParams{1.5, 0.25, PriorMode::Uninformative});
  CHECK(p.c3 == 0.0);
  CHECK(p.c1 == doctest::Approx(std::log(2.0)));
  CHECK(p.c2 == doctest::Approx(-3.0));
}

TEST_CASE("loss floor clamps the decaying threshold") {
  const LossParams loss{1.0, 2.0, 0.1};
  CHECK(loss_factor(loss, 0.0) == 1.0);
  CHECK(loss_factor(loss, 100.0) == 0.1);
  ThresholdParams t{0.0, -2.0, 0.0, std::log(0.1)};
  CHECK(log_threshold(t, 100.0, 0.0) == doctest::Approx(std::log(0.1)));
  CHECK(log_threshold(t, 0.5, 0.0) == doctest::Approx(-1.0));
}

TEST_CASE("negative elapsed time is a contract violation") {
  CHECK(kind_of([] { loss_factor(LossParams{}, -1e-9); }) == ErrorKind::Contract);
  CHECK(kind_of([] { log_threshold(ThresholdParams{}, -1.0, 0.0); }) == ErrorKind::Contract);
  const auto rt = DetectorRuntime::starting_at(1.0);
  CHECK(kind_of([&] { update_runtime(rt, Hypothesis::Moving, 0.5); }) == ErrorKind::Contract);
}

TEST_CASE("ties resolve to moving") {
  CHECK(decide(LogLikelihoodRatio{-3.0, 0}, -3.0) == Hypothesis::Moving);
  CHECK(decide(LogLikelihoodRatio{-2.999, 0}, -3.0) == Hypothesis::Stationary);
}

TEST_CASE("runtime elapsed time resets only on a stationary decision") {
  auto rt = DetectorRuntime::starting_at(10.0);
  CHECK(rt.dt_since_zupt() == 0.0);
  rt = update_runtime(rt, Hypothesis::Moving, 10.5);
  CHECK(rt.dt_since_zupt() == doctest::Approx(0.5));
  rt = update_runtime(rt, Hypothesis::Stationary, 10.75);
  CHECK(rt.dt_since_zupt() == 0.0);
  rt = update_runtime(rt, Hypothesis::Moving, 11.0);
  CHECK(rt.dt_since_zupt() == doctest::Approx(0.25));
}

TEST_CASE("empirical quantile on known samples") {
  std::vector<double> s;
  for (int i = -10; i <= -1; ++i) s.push_back(i);
  CHECK(empirical_quantile(s, 0.05) == -10.0);
  CHECK(empirical_quantile(s, 0.5) == doctest::Approx(-5.5));
  CHECK(empirical_quantile(s, 1.0) == -1.0);
  std::vector<double> one{4.0};
  CHECK(empirical_quantile(one, 0.3) == 4.0);
  CHECK(kind_of([] { empirical_quantile({}, 0.5); }) == ErrorKind::CalibrationData);
}

TEST_CASE("empirical quantile splits random samples near the requested fraction") {
  Gen g(9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 20 + g.index(500);
    std::vector<double> s(n);
    for (auto& x : s) x = g.normal(50.0);
    const double p = g.uniform(0.01, 0.99);
    const double q = empirical_quantile(s, p);
    std::size_t below = 0;
    for (double x : s) below += x < q;
    CHECK(std::abs(static_cast<double>(below) / static_cast<double>(n) - p) <= 1.0 / static_cast<double>(n) + 1e-12);
  }
}

TEST_CASE("calibration picks quantiles and clamps wrong-signed slopes") {
  std::vector<double> still, mid, swing;
  for (int i = 1; i <= 100; ++i) {
    still.push_back(-static_cast<double>(i));
    mid.push_back(-10.0 * i);
    swing.push_back(-1000.0 * i);
  }
  CalibrationInputs in;
  in.stationary_log_lr = still;
  in.midstance_log_lr = mid;
  in.swing_log_lr = swing;
  in.swing_xi_star = 50.0;
  in.dtau = 0.5;
  in.epsilon = 0.05;

  std::vector<std::string> warnings;
  set_warning_sink([&](std::string_view m) { warnings.emplace_back(m); });
  const auto t = calibrate(in);
  CHECK(t.c1 == doctest::Approx(empirical_quantile(still, 0.05)));
  CHECK(t.c2 == doctest::Approx((empirical_quantile(mid, 0.05) - t.c1) / 0.5));
  CHECK(t.c2 < 0.0);
  // Swing sits far below the threshold at dtau/2, so the slope would be negative.
  CHECK(t.c3 == 0.0);
  CHECK(warnings.size() == 1);

  in.prior = PriorMode::Uninformative;
  CHECK(calibrate(in).c3 == 0.0);

  in.prior = PriorMode::Informative;
  swing.assign(100, 0.0);
  in.swing_log_lr = swing;
  const auto informative = calibrate(in);
  CHECK(informative.c3 == doctest::Approx((0.0 - t.c1 - t.c2 * 0.25) / 50.0));
  CHECK(informative.c3 > 0.0);

  in.epsilon = 0.6;
  CHECK(kind_of([&] { calibrate(in); }) == ErrorKind::Config);
  in.epsilon = 0.05;
  in.midstance_log_lr = {};
  CHECK(kind_of([&] { calibrate(in); }) == ErrorKind::CalibrationData);
  set_warning_sink({});
}
