#pragma once

#include <optional>
#include <string>

#include "zupt/types.hpp"

namespace zupt {

/// Result of a stream health check.
struct StreamDiagnostic {
  bool ok{true};
  std::optional<std::size_t> first_offending_index;
  std::string message;
  double median_period{0.0};
  double max_period_deviation{0.0};  // max |period - median|, seconds
};

/// Checks finite values, non-negative strictly increasing time, and reports
/// sampling period statistics. Never throws.
StreamDiagnostic validate_stream(std::span<const ImuSample> stream);

/// Throws Error(Format) carrying the diagnostic message if the stream is bad.
void require_valid_stream(std::span<const ImuSample> stream);

/// Median sampling period of a stream with at least two samples.
double median_period(std::span<const ImuSample> stream);

/// Stride-1 windows of length `window_length`: one per start index
/// 0 .. size - window_length. Windows view into `stream`.
std::vector<ImuWindow> sliding_windows(std::span<const ImuSample> stream, std::size_t window_length);

/// Causal window of `window_length` samples ending at `end_index`.
inline ImuWindow window_ending_at(std::span<const ImuSample> stream, std::size_t end_index,
                                  std::size_t window_length) {
  const std::size_t start = end_index + 1 - window_length;
  return ImuWindow{stream.subspan(start, window_length), start};
}

/// Window length in samples for a duration in milliseconds, using the median
/// sampling period. 20 ms at 250 Hz gives 5.
std::size_t window_samples_from_ms(double window_ms, double period_s);

}  // namespace zupt
