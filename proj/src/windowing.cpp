#include "zupt/windowing.hpp"

#include <algorithm>
#include <cmath>

namespace zupt {

StreamDiagnostic validate_stream(std::span<const ImuSample> stream) {
  StreamDiagnostic diag;
  auto fail = [&diag](std::size_t index, std::string message) {
    diag.ok = false;
    diag.first_offending_index = index;
    diag.message = std::move(message) + " at index " + std::to_string(index);
    return diag;
  };

  for (std::size_t i = 0; i < stream.size(); ++i) {
    const auto& s = stream[i];
    if (!s.finite()) return fail(i, "non-finite value");
    if (s.t < 0.0) return fail(i, "negative time");
    if (i > 0 && !(s.t > stream[i - 1].t)) return fail(i, "non-increasing time");
  }

  if (stream.size() >= 2) {
    diag.median_period = median_period(stream);
    for (std::size_t i = 1; i < stream.size(); ++i) {
      const double dev = std::abs((stream[i].t - stream[i - 1].t) - diag.median_period);
      diag.max_period_deviation = std::max(diag.max_period_deviation, dev);
    }
  }
  return diag;
}

void require_valid_stream(std::span<const ImuSample> stream) {
  const auto diag = validate_stream(stream);
  if (!diag.ok) throw Error(ErrorKind::Format, diag.message);
}

double median_period(std::span<const ImuSample> stream) {
  if (stream.size() < 2) throw Error(ErrorKind::EmptyStream, "need at least two samples to infer a sampling period");
  std::vector<double> periods(stream.size() - 1);
  for (std::size_t i = 1; i < stream.size(); ++i) periods[i - 1] = stream[i].t - stream[i - 1].t;
  const auto mid = periods.begin() + static_cast<std::ptrdiff_t>(periods.size() / 2);
  std::nth_element(periods.begin(), mid, periods.end());
  if (periods.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(periods.begin(), mid);
  return 0.5 * (lower + upper);
}

std::vector<ImuWindow> sliding_windows(std::span<const ImuSample> stream, std::size_t window_length) {
  if (window_length == 0) throw Error(ErrorKind::Config, "window length must be at least 1");
  if (stream.size() < window_length) {
    throw Error(ErrorKind::EmptyStream, "stream has " + std::to_string(stream.size()) +
                                            " samples, fewer than the window length " +
                                            std::to_string(window_length));
  }
  for (std::size_t i = 1; i < stream.size(); ++i) {
    if (!(stream[i].t > stream[i - 1].t)) {
      throw Error(ErrorKind::Format, "non-increasing time at index " + std::to_string(i));
    }
  }
  std::vector<ImuWindow> windows;
  windows.reserve(stream.size() - window_length + 1);
  for (std::size_t n = 0; n + window_length <= stream.size(); ++n) {
    windows.push_back(ImuWindow{stream.subspan(n, window_length), n});
  }
  return windows;
}

std::size_t window_samples_from_ms(double window_ms, double period_s) {
  if (!(window_ms > 0.0) || !(period_s > 0.0)) {
    throw Error(ErrorKind::Config, "window duration and sampling period must be positive");
  }
  const auto n = static_cast<std::size_t>(std::llround(window_ms * 1e-3 / period_s));
  return std::max<std::size_t>(n, 1);
}

}  // namespace zupt
