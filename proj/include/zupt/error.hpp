#pragma once

#include <stdexcept>
#include <string>

namespace zupt {

/// Broad failure classes. The CLI maps each to its own exit code.
enum class ErrorKind {
  Format,           // malformed input file, non-monotone time, non-finite values
  EmptyStream,      // fewer samples than one window
  DegenerateWindow, // zero mean specific force inside a window
  Contract,         // caller broke a precondition (negative dt, time going backwards)
  Numerical,        // singular innovation covariance and similar
  Config,           // bad parameter value or unknown key
  CalibrationData,  // a calibration sample set came out empty
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Format: return "format";
    case ErrorKind::EmptyStream: return "empty-stream";
    case ErrorKind::DegenerateWindow: return "degenerate-window";
    case ErrorKind::Contract: return "contract";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::Config: return "config";
    case ErrorKind::CalibrationData: return "calibration-data";
  }
  return "unknown";
}

}  // namespace zupt
