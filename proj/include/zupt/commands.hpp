#pragma once

#include <string>
#include <vector>

#include "zupt/config.hpp"
#include "zupt/io.hpp"

namespace zupt {

/// One pipeline run on a recording.
RunReport cmd_run(const Recording& recording, const Config& config);

/// Root mean square of loop-closure errors; 0 for an empty set.
double rmse(std::span<const double> errors);

struct SweepRow {
  std::string threshold_mode;  // "fixed" or "adaptive"
  double c1{0.0};
  std::string subset;          // gait tag or "all"
  double rmse_m{0.0};
  std::size_t n_recordings{0};
};

/// Evenly spaced fixed log-thresholds from sweep_c1_min to sweep_c1_max.
std::vector<double> c1_grid(const Config& config);

/// Fixed-threshold runs for every grid value (c2 = c3 = 0) plus one adaptive
/// run with the configured parameters. Rows come per subset: each gait tag
/// in sorted order, then "all". Recordings without a loop length are skipped
/// with a warning.
std::vector<SweepRow> cmd_sweep(std::span<const Recording> recordings, const Config& config,
                                std::span<const double> grid);

void write_sweep_table(std::ostream& out, std::span<const SweepRow> rows);

/// Joins streams end to end, re-basing time so each recording starts one of
/// its own median periods after the previous one ends.
std::vector<ImuSample> concatenate_streams(std::span<const Recording> recordings);

struct ConcatResult {
  double final_position_error_m{0.0};
  std::size_t n_samples{0};
  RunReport report;
};

/// One pipeline run over the concatenated recordings, filter and detector
/// state carried across the joins.
ConcatResult cmd_concat(std::span<const Recording> recordings, const Config& config);

/// Extracts calibration sets from a labelled stream and runs calibrate().
ThresholdParams cmd_calibrate(std::span<const ImuSample> stream, std::span<const std::uint8_t> labels,
                              const Config& config);

}  // namespace zupt
