#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "support.hpp"
#include "zupt/commands.hpp"
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

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("zupt_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

CsvFormat units(AccelUnit a, GyroUnit g) {
  CsvFormat f;
  f.accel_unit = a;
  f.gyro_unit = g;
  return f;
}

LabeledRecording walk(std::uint64_t seed, bool fast = false, double duration = 20.0) {
  auto p = fast ? GaitProfile::fast_gait() : GaitProfile::normal_gait();
  p.seed = seed;
  return simulate(p, duration, PathShape::ClosedLoop);
}

}  // namespace

TEST_CASE("imu csv round trip is exact") {
  Gen g(21);
  const auto s = g.stream(50);
  std::stringstream buf;
  write_imu_csv(buf, s);
  const auto back = read_imu_csv(buf, units(AccelUnit::MetersPerSecond2, GyroUnit::RadiansPerSecond));
  REQUIRE(back.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(back[i].t == s[i].t);
    CHECK(back[i].accel == s[i].accel);
    CHECK(back[i].gyro == s[i].gyro);
  }
}

TEST_CASE("explicit units are converted to SI") {
  std::stringstream in("t,ax,ay,az,gx,gy,gz\n0,0,0,1,90,0,0\n0.01,0,0,1,0,0,-180\n");
  const auto s = read_imu_csv(in, units(AccelUnit::StandardGravity, GyroUnit::DegreesPerSecond));
  CHECK(s[0].accel.z() == doctest::Approx(9.80665));
  CHECK(s[0].gyro.x() == doctest::Approx(std::numbers::pi / 2));
  CHECK(s[1].gyro.z() == doctest::Approx(-std::numbers::pi));
}

TEST_CASE("auto units: SI passes, accel in g is ambiguous") {
  Gen g(22);
  std::stringstream si;
  write_imu_csv(si, g.stream(20, 250.0, 0.5, 0.5));
  CHECK(read_imu_csv(si).size() == 20);

  std::stringstream in_g("t,ax,ay,az,gx,gy,gz\n0,0,0,1,0,0,0\n0.01,0,0,1.01,0,0,0\n");
  CHECK(kind_of([&] { read_imu_csv(in_g); }) == ErrorKind::Format);
}

TEST_CASE("malformed rows and shuffled timestamps are format errors") {
  std::stringstream bad("t,ax,ay,az,gx,gy,gz\n0,0,0,9.8,0,0,0\n0.004,0,zero,9.8,0,0,0\n");
  try {
    read_imu_csv(bad, units(AccelUnit::MetersPerSecond2, GyroUnit::RadiansPerSecond));
    FAIL("expected a format error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Format);
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
  std::stringstream shuffled("t,ax,ay,az,gx,gy,gz\n0,0,0,9.8,0,0,0\n0.008,0,0,9.8,0,0,0\n0.004,0,0,9.8,0,0,0\n");
  CHECK(kind_of([&] { read_imu_csv(shuffled, units(AccelUnit::MetersPerSecond2, GyroUnit::RadiansPerSecond)); }) ==
        ErrorKind::Format);
  std::stringstream header("time,ax,ay,az,gx,gy,gz\n0,0,0,9.8,0,0,0\n");
  CHECK(kind_of([&] { read_imu_csv(header); }) == ErrorKind::Format);
}

TEST_CASE("labels round trip and must align with the stream") {
  const auto rec = walk(23);
  std::stringstream buf;
  write_labels_csv(buf, rec.stream, rec.stationary);
  CHECK(read_labels_csv(buf, rec.stream) == rec.stationary);

  std::stringstream short_labels("t,stationary\n0,1\n");
  CHECK(kind_of([&] { read_labels_csv(short_labels, rec.stream); }) == ErrorKind::Format);
}

TEST_CASE("report round trip") {
  const auto rec = walk(24);
  Recording r{"walk24", rec.stream, "normal", rec.path_length_m};
  Config cfg;
  const auto report = cmd_run(r, cfg);
  std::stringstream buf;
  write_report(buf, report);
  const auto back = parse_report(buf);
  CHECK(back.recording_id == "walk24");
  CHECK(back.n_samples == rec.stream.size());
  CHECK(back.zupt_count == report.result.zupt_count);
  CHECK(back.final_position == report.result.final_solution.state.p);
  CHECK(back.loop_closure_error_m == report.result.loop_closure_error_m);
  CHECK(back.params.at("c1") == cfg.get("c1"));
  CHECK(back.params.size() == cfg.entries().size());
}

TEST_CASE("trace table has one row per windowed sample") {
  const auto rec = walk(25);
  const auto result = run_pipeline(rec.stream, PipelineConfig{});
  std::stringstream buf;
  write_trace(buf, result);
  std::string line;
  std::getline(buf, line);
  CHECK(line == "t,px,py,pz,decision,log_lr,log_gamma,xi,dt_since_zupt");
  std::size_t rows = 0;
  while (std::getline(buf, line)) ++rows;
  CHECK(rows == result.decisions.size());
}

TEST_CASE("format_double round-trips and spells non-finite values") {
  Gen g(26);
  for (int i = 0; i < 1000; ++i) {
    const double x = g.normal(1e3) * std::pow(10.0, g.uniform(-12, 12));
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("config rejects unknown keys and bad values") {
  Config c;
  CHECK(kind_of([&] { c.set("nope", "1"); }) == ErrorKind::Config);
  CHECK(kind_of([&] { c.set("c1", "abc"); }) == ErrorKind::Config);
  CHECK(kind_of([&] { c.set("window_samples", "2.5"); }) == ErrorKind::Config);
  CHECK(kind_of([&] { c.set("detector", "magnitude"); }) == ErrorKind::Config);
  c.set_assignment(" c1 = -55 ");
  CHECK(c.number("c1") == -55.0);

  std::stringstream file("# comment\nwindow_samples = 7\nprior = uninformative # trailing\n\n");
  c.load(file);
  const auto pc = pipeline_config(c);
  CHECK(pc.window_samples == 7);
  CHECK(pc.prior == PriorMode::Uninformative);
  CHECK(pc.fixed_log_gamma == -55.0);

  std::stringstream bad("c1 = 1\nwat = 2\n");
  try {
    c.load(bad);
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("positive c2 is clamped with a warning") {
  std::vector<std::string> warnings;
  set_warning_sink([&](std::string_view m) { warnings.emplace_back(m); });
  Config c;
  c.set("c2", "5");
  CHECK(threshold_params(c).c2 == 0.0);
  CHECK(warnings.size() == 1);
  set_warning_sink({});
}

TEST_CASE("printed configuration lists every key") {
  Config c;
  std::stringstream out;
  c.print(out);
  for (const auto& [key, value] : c.entries()) {
    CHECK(out.str().find(key + " = " + value) != std::string::npos);
  }
}

TEST_CASE("sweep table has grid + 1 rows per subset") {
  std::vector<Recording> recs;
  for (int i = 0; i < 2; ++i) {
    const auto n = walk(30 + i);
    const auto f = walk(40 + i, true);
    recs.push_back({"n" + std::to_string(i), n.stream, "normal", n.path_length_m});
    recs.push_back({"f" + std::to_string(i), f.stream, "fast", f.path_length_m});
  }
  recs.push_back({"open", walk(50).stream, "normal", std::nullopt});

  set_warning_sink({});
  Config cfg;
  cfg.set("sweep_points", "4");
  const auto grid = c1_grid(cfg);
  REQUIRE(grid.size() == 4);
  CHECK(grid.front() == cfg.number("sweep_c1_min"));
  CHECK(grid.back() == cfg.number("sweep_c1_max"));

  const auto rows = cmd_sweep(recs, cfg, grid);
  CHECK(rows.size() == 3 * (grid.size() + 1));
  std::size_t adaptive_rows = 0;
  for (const auto& r : rows) {
    adaptive_rows += r.threshold_mode == "adaptive";
    CHECK(r.n_recordings == (r.subset == "all" ? 4u : 2u));
    CHECK(r.rmse_m >= 0.0);
  }
  CHECK(adaptive_rows == 3);

  std::stringstream out;
  write_sweep_table(out, rows);
  CHECK(out.str().rfind("threshold_mode,c1,subset,rmse_m,n_recordings\n", 0) == 0);

  const std::vector<double> one{-100.0};
  const std::vector<Recording> single{recs.front()};
  CHECK(cmd_sweep(single, cfg, one).size() == 2 * 2);
  CHECK(kind_of([&] { cmd_sweep(single, cfg, {}); }) == ErrorKind::Config);
}

TEST_CASE("rmse of loop errors") {
  const std::vector<double> e{3.0, 4.0};
  CHECK(rmse(e) == doctest::Approx(std::sqrt(12.5)));
}

TEST_CASE("concatenating one recording is the same as running it") {
  const auto rec = walk(60);
  Recording r{"a", rec.stream, "normal", rec.path_length_m};
  Config cfg;
  const std::vector<Recording> one{r};
  const auto joined = cmd_concat(one, cfg);
  const auto single = cmd_run(r, cfg);
  CHECK(joined.final_position_error_m == single.result.loop_closure_error_m);
  CHECK(joined.n_samples == rec.stream.size());
}

TEST_CASE("concatenation keeps time strictly increasing") {
  const auto a = walk(61), b = walk(62);
  const std::vector<Recording> recs{{"a", a.stream, {}, {}}, {"b", b.stream, {}, {}}};
  const auto s = concatenate_streams(recs);
  CHECK(s.size() == a.stream.size() + b.stream.size());
  CHECK(validate_stream(s).ok);
  CHECK(s[a.stream.size()].t - s[a.stream.size() - 1].t == doctest::Approx(0.004));
}

TEST_CASE("calibrate command checks epsilon and honours the prior mode") {
  set_warning_sink({});
  const auto rec = walk(70, false, 30.0);
  Config cfg;
  cfg.set("epsilon", "0.6");
  CHECK(kind_of([&] { cmd_calibrate(rec.stream, rec.stationary, cfg); }) == ErrorKind::Config);
  cfg.set("epsilon", "0.05");
  cfg.set("prior", "uninformative");
  const auto t = cmd_calibrate(rec.stream, rec.stationary, cfg);
  CHECK(t.c3 == 0.0);
  CHECK(t.c2 < 0.0);
}

TEST_CASE("calibration on a standing-only recording has no stances") {
  const auto rec = simulate(GaitProfile::standing(), 10.0, PathShape::Straight);
  CHECK(kind_of([&] { cmd_calibrate(rec.stream, rec.stationary, Config{}); }) == ErrorKind::CalibrationData);
}

TEST_CASE("manifest resolves relative paths and optional columns") {
  const auto dir = scratch_dir("manifest");
  const auto rec = walk(80);
  {
    std::ofstream f(dir / "w.csv");
    write_imu_csv(f, rec.stream);
    std::ofstream m(dir / "m.csv");
    m << "path,gait_tag,loop_length_m\nw.csv,normal,12.5\nw.csv,,\n";
  }
  const auto recs = read_manifest((dir / "m.csv").string());
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].gait_tag == "normal");
  CHECK(recs[0].loop_length_m == 12.5);
  CHECK_FALSE(recs[1].gait_tag);
  CHECK_FALSE(recs[1].loop_length_m);
  CHECK(recs[0].stream.size() == rec.stream.size());
  std::filesystem::remove_all(dir);
}
