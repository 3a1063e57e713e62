#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zupt/pipeline.hpp"

namespace zupt {

enum class AccelUnit { Auto, MetersPerSecond2, StandardGravity };
enum class GyroUnit { Auto, RadiansPerSecond, DegreesPerSecond };

AccelUnit parse_accel_unit(const std::string& name);  // auto | mps2 | g
GyroUnit parse_gyro_unit(const std::string& name);    // auto | rad | deg

/// Column names and units of an input CSV. `columns` lists the header names
/// holding t, ax, ay, az, gx, gy, gz in that order; other columns are ignored.
/// Auto units assume SI but reject data that looks like g or deg/s.
struct CsvFormat {
  std::array<std::string, 7> columns{"t", "ax", "ay", "az", "gx", "gy", "gz"};
  AccelUnit accel_unit{AccelUnit::Auto};
  GyroUnit gyro_unit{GyroUnit::Auto};
  double standard_gravity{9.80665};
};

/// An ingested data set. Recordings without a loop length still run but are
/// left out of RMSE tables.
struct Recording {
  std::string id;
  std::vector<ImuSample> stream;
  std::optional<std::string> gait_tag;
  std::optional<double> loop_length_m;
};

std::vector<ImuSample> read_imu_csv(std::istream& in, const CsvFormat& format = {});
Recording ingest_csv(const std::string& path, const CsvFormat& format = {});
void write_imu_csv(std::ostream& out, std::span<const ImuSample> stream);

/// Labels sidecar with header `t,stationary` and 0/1 values, one row per sample.
std::vector<std::uint8_t> read_labels_csv(std::istream& in, std::span<const ImuSample> stream);
std::vector<std::uint8_t> read_labels_csv(const std::string& path, std::span<const ImuSample> stream);
void write_labels_csv(std::ostream& out, std::span<const ImuSample> stream, std::span<const std::uint8_t> labels);

/// Manifest listing recordings for sweeps: header `path,gait_tag,loop_length_m`,
/// relative paths resolved against the manifest's directory, empty fields allowed.
std::vector<Recording> read_manifest(const std::string& path, const CsvFormat& format = {});

/// Outcome of one pipeline run plus the parameters that produced it.
struct RunReport {
  std::string recording_id;
  PipelineResult result;
  std::vector<std::pair<std::string, std::string>> params_used;
};

/// Summary fields of a written report, as read back.
struct ReportSummary {
  std::string recording_id;
  std::size_t n_samples{0};
  std::size_t first_window_index{0};
  std::size_t zupt_count{0};
  Vector3d final_position{Vector3d::Zero()};
  double loop_closure_error_m{0.0};
  std::map<std::string, std::string> params;
};

/// `key=value` lines; parameters are prefixed with `param.`.
void write_report(std::ostream& out, const RunReport& report);
ReportSummary parse_report(std::istream& in);

/// Per-sample table `t,px,py,pz,decision,log_lr,log_gamma,xi,dt_since_zupt`
/// for samples from first_window_index on.
void write_trace(std::ostream& out, const PipelineResult& result);

std::string format_double(double value);

}  // namespace zupt
