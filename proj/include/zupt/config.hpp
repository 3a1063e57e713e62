#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "zupt/gait_sim.hpp"
#include "zupt/io.hpp"
#include "zupt/pipeline.hpp"

namespace zupt {

/// Flat key-value configuration. Every key has a documented default; unknown
/// keys and malformed values are rejected with Error(Config).
class Config {
 public:
  Config();

  void set(const std::string& key, const std::string& value);
  /// `key=value` override as given on the command line.
  void set_assignment(const std::string& assignment);
  /// Lines `key = value`; '#' starts a comment.
  void load(std::istream& in);
  void load_file(const std::string& path);

  const std::string& get(const std::string& key) const;
  double number(const std::string& key) const;
  std::size_t count(const std::string& key) const;

  std::vector<std::pair<std::string, std::string>> entries() const;
  /// All keys with current values and one-line descriptions.
  void print(std::ostream& out) const;

  static bool known(const std::string& key);

 private:
  std::map<std::string, std::string> values_;
};

PipelineConfig pipeline_config(const Config& config);
CsvFormat csv_format(const Config& config);
GaitProfile gait_profile(const Config& config);
ThresholdParams threshold_params(const Config& config);
/// Writes c1, c2, c3 back into the configuration.
void store_threshold_params(Config& config, const ThresholdParams& params);

}  // namespace zupt
