// Command-line harness for zero-velocity-aided inertial navigation runs.
//
// Exit codes:
//   0  success
//   1  unexpected failure
//   2  configuration or usage error
//   3  input format error (malformed CSV, bad timestamps, too few samples)
//   4  numerical error
//   5  calibration data error (a phase set came out empty)
//   6  internal contract violation

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "zupt/commands.hpp"

namespace {

using namespace zupt;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Format:
    case ErrorKind::EmptyStream:
    case ErrorKind::DegenerateWindow: return 3;
    case ErrorKind::Numerical: return 4;
    case ErrorKind::CalibrationData: return 5;
    case ErrorKind::Contract: return 6;
  }
  return 1;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Config, "cannot write '" + path + "'");
  return out;
}

// Writes to `path`, or stdout when it is empty or "-".
template <typename Fn>
void emit(const std::string& path, Fn fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
  } else {
    auto out = open_output(path);
    fn(out);
  }
}

std::vector<Recording> ingest_all(const std::vector<std::string>& paths, const Config& config) {
  std::vector<Recording> recs;
  for (const auto& p : paths) recs.push_back(ingest_csv(p, csv_format(config)));
  return recs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-velocity-aided foot-mounted inertial navigation with a Bayesian adaptive detector"};
  app.require_subcommand(0, 1);

  std::string config_file;
  std::vector<std::string> overrides;
  bool print_config = false;
  std::optional<std::size_t> window_samples;
  std::optional<std::string> detector, prior, gyro_unit, accel_unit, threshold_mode;
  std::optional<double> epsilon, dtau;
  std::optional<std::uint64_t> seed;

  app.add_option("--config", config_file, "flat key=value configuration file")->check(CLI::ExistingFile);
  app.add_option("--set", overrides, "override a configuration key (key=value), repeatable");
  app.add_flag("--print-config", print_config, "print the effective configuration");
  app.add_option("--window-samples", window_samples, "detector window length in samples");
  app.add_option("--detector", detector, "shoe | are");
  app.add_option("--prior", prior, "informative | uninformative");
  app.add_option("--threshold-mode", threshold_mode, "adaptive | fixed");
  app.add_option("--epsilon", epsilon, "calibration tail probability");
  app.add_option("--dtau", dtau, "approximate step duration, s");
  app.add_option("--gyro-unit", gyro_unit, "auto | rad | deg");
  app.add_option("--accel-unit", accel_unit, "auto | mps2 | g");
  app.add_option("--seed", seed, "simulator seed");

  std::string report_path, trace_path, out_path, labels_path, manifest_path;
  std::vector<std::string> inputs;

  auto* run = app.add_subcommand("run", "run the pipeline on one recording");
  run->add_option("input", inputs, "IMU CSV file")->required()->expected(1);
  run->add_option("--report", report_path, "report output (default stdout)");
  run->add_option("--trace", trace_path, "per-sample trace table output");

  auto* sweep = app.add_subcommand("sweep", "fixed-threshold grid vs adaptive RMSE table");
  sweep->add_option("--manifest", manifest_path, "CSV manifest: path,gait_tag,loop_length_m")->required();
  sweep->add_option("--out", out_path, "table output (default stdout)");

  auto* calibrate_cmd = app.add_subcommand("calibrate", "select c1, c2, c3 from a labelled recording");
  calibrate_cmd->add_option("input", inputs, "IMU CSV file")->required()->expected(1);
  calibrate_cmd->add_option("--labels", labels_path, "labels sidecar t,stationary")->required();
  calibrate_cmd->add_option("--out", out_path, "write the parameters as config lines");

  std::string gait_override, path_shape;
  std::optional<double> duration;
  auto* simulate_cmd = app.add_subcommand("simulate", "generate a synthetic labelled recording");
  simulate_cmd->add_option("--out", out_path, "output prefix: <prefix>.csv, .labels.csv, .truth.csv")->required();
  simulate_cmd->add_option("--gait", gait_override, "normal | fast | standing");
  simulate_cmd->add_option("--duration", duration, "seconds");
  simulate_cmd->add_option("--path", path_shape, "loop | straight");
  simulate_cmd->add_option("--manifest", manifest_path, "append a row to this manifest");

  auto* concat = app.add_subcommand("concat", "run over recordings joined end to end");
  concat->add_option("inputs", inputs, "IMU CSV files")->required()->expected(1, -1);
  concat->add_option("--report", report_path, "report output (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    Config config;
    if (!config_file.empty()) config.load_file(config_file);
    for (const auto& o : overrides) config.set_assignment(o);
    if (window_samples) config.set("window_samples", std::to_string(*window_samples));
    if (detector) config.set("detector", *detector);
    if (prior) config.set("prior", *prior);
    if (threshold_mode) config.set("threshold_mode", *threshold_mode);
    if (epsilon) config.set("epsilon", format_double(*epsilon));
    if (dtau) config.set("dtau", format_double(*dtau));
    if (gyro_unit) config.set("gyro_unit", *gyro_unit);
    if (accel_unit) config.set("accel_unit", *accel_unit);
    if (seed) config.set("seed", std::to_string(*seed));
    if (!gait_override.empty()) config.set("sim_gait", gait_override);
    if (duration) config.set("sim_duration", format_double(*duration));
    if (!path_shape.empty()) config.set("sim_path", path_shape);

    if (print_config) {
      config.print(std::cout);
      if (app.get_subcommands().empty()) return 0;
    } else if (app.get_subcommands().empty()) {
      std::cout << app.help();
      return 2;
    }

    if (run->parsed()) {
      const auto rec = ingest_csv(inputs.front(), csv_format(config));
      const auto report = cmd_run(rec, config);
      emit(report_path, [&](std::ostream& out) { write_report(out, report); });
      if (!trace_path.empty()) emit(trace_path, [&](std::ostream& out) { write_trace(out, report.result); });
    } else if (sweep->parsed()) {
      const auto recs = read_manifest(manifest_path, csv_format(config));
      const auto grid = c1_grid(config);
      const auto rows = cmd_sweep(recs, config, grid);
      emit(out_path, [&](std::ostream& out) { write_sweep_table(out, rows); });
    } else if (calibrate_cmd->parsed()) {
      const auto rec = ingest_csv(inputs.front(), csv_format(config));
      const auto labels = read_labels_csv(labels_path, rec.stream);
      const auto params = cmd_calibrate(rec.stream, labels, config);
      emit(out_path, [&](std::ostream& out) {
        out << "# calibrated from " << inputs.front() << " (epsilon=" << config.get("epsilon")
            << ", dtau=" << config.get("dtau") << ", prior=" << config.get("prior") << ")\n";
        out << "c1 = " << format_double(params.c1) << "\nc2 = " << format_double(params.c2)
            << "\nc3 = " << format_double(params.c3) << '\n';
      });
    } else if (simulate_cmd->parsed()) {
      const auto profile = gait_profile(config);
      const auto rec = simulate(profile, config.number("sim_duration"), parse_path_shape(config.get("sim_path")));
      emit(out_path + ".csv", [&](std::ostream& out) { write_imu_csv(out, rec.stream); });
      emit(out_path + ".labels.csv", [&](std::ostream& out) { write_labels_csv(out, rec.stream, rec.stationary); });
      emit(out_path + ".truth.csv", [&](std::ostream& out) {
        out << "t,px,py,pz\n";
        for (std::size_t i = 0; i < rec.stream.size(); ++i) {
          const auto& p = rec.true_positions[i];
          out << format_double(rec.stream[i].t) << ',' << format_double(p.x()) << ',' << format_double(p.y()) << ','
              << format_double(p.z()) << '\n';
        }
      });
      if (!manifest_path.empty()) {
        const bool fresh = !std::filesystem::exists(manifest_path);
        std::ofstream m(manifest_path, std::ios::app);
        if (!m) throw Error(ErrorKind::Config, "cannot append to '" + manifest_path + "'");
        if (fresh) m << "path,gait_tag,loop_length_m\n";
        const auto csv = std::filesystem::absolute(out_path + ".csv").string();
        const bool closed = config.get("sim_path") == "loop";
        m << csv << ',' << config.get("sim_gait") << ',' << (closed ? format_double(rec.path_length_m) : "") << '\n';
      }
      std::cout << "samples=" << rec.stream.size() << " strides=" << rec.strides
                << " path_length_m=" << format_double(rec.path_length_m) << '\n';
    } else if (concat->parsed()) {
      const auto recs = ingest_all(inputs, config);
      const auto result = cmd_concat(recs, config);
      emit(report_path, [&](std::ostream& out) { write_report(out, result.report); });
      std::cerr << "final_position_error_m=" << format_double(result.final_position_error_m) << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
