#include "zupt/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "zupt/windowing.hpp"

namespace zupt {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_number(std::string_view field) {
  if (field.empty()) return std::nullopt;
  if (field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) return std::nullopt;
  return value;
}

Error format_error(const std::string& what) { return Error(ErrorKind::Format, what); }

bool blank_or_comment(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Format, "cannot open '" + path + "'");
  return in;
}

double median_of(std::vector<double> values) {
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

}  // namespace

AccelUnit parse_accel_unit(const std::string& name) {
  if (name == "auto") return AccelUnit::Auto;
  if (name == "mps2" || name == "m/s2" || name == "si") return AccelUnit::MetersPerSecond2;
  if (name == "g") return AccelUnit::StandardGravity;
  throw Error(ErrorKind::Config, "unknown accel unit '" + name + "' (expected auto|mps2|g)");
}

GyroUnit parse_gyro_unit(const std::string& name) {
  if (name == "auto") return GyroUnit::Auto;
  if (name == "rad" || name == "rad/s") return GyroUnit::RadiansPerSecond;
  if (name == "deg" || name == "deg/s") return GyroUnit::DegreesPerSecond;
  throw Error(ErrorKind::Config, "unknown gyro unit '" + name + "' (expected auto|rad|deg)");
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::vector<ImuSample> read_imu_csv(std::istream& in, const CsvFormat& format) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!blank_or_comment(line)) break;
  }
  if (in.fail() && line.empty()) throw format_error("missing CSV header");

  const auto header = split(line);
  std::array<std::size_t, 7> col{};
  for (std::size_t i = 0; i < format.columns.size(); ++i) {
    const auto it = std::find(header.begin(), header.end(), format.columns[i]);
    if (it == header.end()) throw format_error("header lacks column '" + format.columns[i] + "'");
    col[i] = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<ImuSample> stream;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_or_comment(line)) continue;
    const auto fields = split(line);
    const std::size_t row = stream.size();
    if (fields.size() != header.size()) {
      throw format_error("malformed row " + std::to_string(row) + " (line " + std::to_string(line_no) + "): expected " +
                         std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    }
    std::array<double, 7> v{};
    for (std::size_t i = 0; i < 7; ++i) {
      const auto x = parse_number(fields[col[i]]);
      if (!x) {
        throw format_error("malformed row " + std::to_string(row) + " (line " + std::to_string(line_no) +
                           "): bad number in column '" + format.columns[i] + "'");
      }
      v[i] = *x;
    }
    ImuSample s;
    s.t = v[0];
    s.accel = Vector3d(v[1], v[2], v[3]);
    s.gyro = Vector3d(v[4], v[5], v[6]);
    stream.push_back(s);
  }
  if (stream.empty()) throw Error(ErrorKind::EmptyStream, "CSV holds no samples");

  std::vector<double> accel_norms, gyro_norms;
  accel_norms.reserve(stream.size());
  gyro_norms.reserve(stream.size());
  for (const auto& s : stream) {
    accel_norms.push_back(s.accel.norm());
    gyro_norms.push_back(s.gyro.cwiseAbs().maxCoeff());
  }

  switch (format.accel_unit) {
    case AccelUnit::StandardGravity:
      for (auto& s : stream) s.accel *= format.standard_gravity;
      break;
    case AccelUnit::Auto: {
      const double m = median_of(accel_norms);
      if (m > 0.5 && m < 2.0) {
        throw Error(ErrorKind::Format, "accelerometer magnitude (median " + format_double(m) +
                                           ") looks like g units; pass --accel-unit g or --accel-unit mps2");
      }
      break;
    }
    case AccelUnit::MetersPerSecond2: break;
  }
  switch (format.gyro_unit) {
    case GyroUnit::DegreesPerSecond:
      for (auto& s : stream) s.gyro *= std::numbers::pi / 180.0;
      break;
    case GyroUnit::Auto: {
      const double peak = *std::max_element(gyro_norms.begin(), gyro_norms.end());
      if (peak > 50.0) {
        throw Error(ErrorKind::Format, "angular rate peak " + format_double(peak) +
                                           " is implausible in rad/s; pass --gyro-unit deg or --gyro-unit rad");
      }
      break;
    }
    case GyroUnit::RadiansPerSecond: break;
  }

  require_valid_stream(stream);
  return stream;
}

Recording ingest_csv(const std::string& path, const CsvFormat& format) {
  auto in = open_input(path);
  Recording rec;
  rec.id = std::filesystem::path(path).stem().string();
  try {
    rec.stream = read_imu_csv(in, format);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
  return rec;
}

void write_imu_csv(std::ostream& out, std::span<const ImuSample> stream) {
  out << "t,ax,ay,az,gx,gy,gz\n";
  for (const auto& s : stream) {
    out << format_double(s.t);
    for (int i = 0; i < 3; ++i) out << ',' << format_double(s.accel[i]);
    for (int i = 0; i < 3; ++i) out << ',' << format_double(s.gyro[i]);
    out << '\n';
  }
}

std::vector<std::uint8_t> read_labels_csv(std::istream& in, std::span<const ImuSample> stream) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!blank_or_comment(line)) break;
  }
  const auto header = split(line);
  if (header.size() != 2 || header[0] != "t" || header[1] != "stationary") {
    throw format_error("labels header must be 't,stationary'");
  }
  std::vector<std::uint8_t> labels;
  labels.reserve(stream.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_or_comment(line)) continue;
    const auto fields = split(line);
    const std::size_t row = labels.size();
    const auto t = fields.size() == 2 ? parse_number(fields[0]) : std::nullopt;
    if (!t || (fields[1] != "0" && fields[1] != "1")) {
      throw format_error("malformed label row " + std::to_string(row) + " (line " + std::to_string(line_no) + ")");
    }
    if (row >= stream.size() || std::abs(*t - stream[row].t) > 1e-6) {
      throw format_error("label row " + std::to_string(row) + " does not match the sample time");
    }
    labels.push_back(fields[1] == "1" ? 1 : 0);
  }
  if (labels.size() != stream.size()) {
    throw format_error("labels file has " + std::to_string(labels.size()) + " rows for " +
                       std::to_string(stream.size()) + " samples");
  }
  return labels;
}

std::vector<std::uint8_t> read_labels_csv(const std::string& path, std::span<const ImuSample> stream) {
  auto in = open_input(path);
  return read_labels_csv(in, stream);
}

void write_labels_csv(std::ostream& out, std::span<const ImuSample> stream, std::span<const std::uint8_t> labels) {
  out << "t,stationary\n";
  for (std::size_t i = 0; i < stream.size(); ++i) out << format_double(stream[i].t) << ',' << int(labels[i]) << '\n';
}

std::vector<Recording> read_manifest(const std::string& path, const CsvFormat& format) {
  auto in = open_input(path);
  const auto base = std::filesystem::path(path).parent_path();
  std::string line;
  while (std::getline(in, line) && blank_or_comment(line)) {
  }
  const auto header = split(line);
  if (header.size() != 3 || header[0] != "path" || header[1] != "gait_tag" || header[2] != "loop_length_m") {
    throw format_error(path + ": manifest header must be 'path,gait_tag,loop_length_m'");
  }
  std::vector<Recording> recs;
  while (std::getline(in, line)) {
    if (blank_or_comment(line)) continue;
    const auto f = split(line);
    if (f.size() != 3 || f[0].empty()) throw format_error(path + ": malformed manifest row '" + line + "'");
    std::filesystem::path file{std::string(f[0])};
    if (file.is_relative()) file = base / file;
    Recording rec = ingest_csv(file.string(), format);
    if (!f[1].empty()) rec.gait_tag = std::string(f[1]);
    if (!f[2].empty()) {
      const auto len = parse_number(f[2]);
      if (!len || !(*len > 0)) throw format_error(path + ": bad loop length in row '" + line + "'");
      rec.loop_length_m = *len;
    }
    recs.push_back(std::move(rec));
  }
  if (recs.empty()) throw Error(ErrorKind::EmptyStream, path + ": manifest lists no recordings");
  return recs;
}

void write_report(std::ostream& out, const RunReport& report) {
  const auto& r = report.result;
  const Vector3d& p = r.positions.back();
  out << "# zupt run report v1\n";
  out << "recording_id=" << report.recording_id << '\n';
  out << "n_samples=" << r.times.size() << '\n';
  out << "first_window_index=" << r.first_window_index << '\n';
  out << "zupt_count=" << r.zupt_count << '\n';
  out << "final_position=" << format_double(p.x()) << ',' << format_double(p.y()) << ',' << format_double(p.z()) << '\n';
  out << "loop_closure_error_m=" << format_double(r.loop_closure_error_m) << '\n';
  for (const auto& [key, value] : report.params_used) out << "param." << key << '=' << value << '\n';
}

ReportSummary parse_report(std::istream& in) {
  ReportSummary s;
  std::string line;
  bool saw_id = false, saw_error = false;
  auto number = [](std::string_view v, const std::string& key) {
    const auto x = parse_number(v);
    if (!x) throw format_error("report: bad value for " + key);
    return *x;
  };
  while (std::getline(in, line)) {
    if (blank_or_comment(line)) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw format_error("report: line without '=': " + line);
    const std::string key = line.substr(0, eq);
    const std::string_view value = trim(std::string_view(line).substr(eq + 1));
    if (key == "recording_id") {
      s.recording_id = std::string(value);
      saw_id = true;
    } else if (key == "n_samples") {
      s.n_samples = static_cast<std::size_t>(number(value, key));
    } else if (key == "first_window_index") {
      s.first_window_index = static_cast<std::size_t>(number(value, key));
    } else if (key == "zupt_count") {
      s.zupt_count = static_cast<std::size_t>(number(value, key));
    } else if (key == "final_position") {
      const auto f = split(value);
      if (f.size() != 3) throw format_error("report: final_position needs three components");
      for (int i = 0; i < 3; ++i) s.final_position[i] = number(f[static_cast<std::size_t>(i)], key);
    } else if (key == "loop_closure_error_m") {
      s.loop_closure_error_m = number(value, key);
      saw_error = true;
    } else if (key.rfind("param.", 0) == 0) {
      s.params[key.substr(6)] = std::string(value);
    } else {
      throw format_error("report: unknown key '" + key + "'");
    }
  }
  if (!saw_id || !saw_error) throw format_error("report: missing recording_id or loop_closure_error_m");
  return s;
}

void write_trace(std::ostream& out, const PipelineResult& r) {
  out << "t,px,py,pz,decision,log_lr,log_gamma,xi,dt_since_zupt\n";
  for (std::size_t i = 0; i < r.decisions.size(); ++i) {
    const std::size_t k = r.first_window_index + i;
    const Vector3d& p = r.positions[k];
    out << format_double(r.times[k]) << ',' << format_double(p.x()) << ',' << format_double(p.y()) << ','
        << format_double(p.z()) << ',' << (r.decisions[i] == Hypothesis::Stationary ? 1 : 0) << ','
        << format_double(r.log_lr[i]) << ',' << format_double(r.log_gamma[i]) << ',' << format_double(r.xi[i]) << ','
        << format_double(r.dt_since_zupt[i]) << '\n';
  }
}

}  // namespace zupt
