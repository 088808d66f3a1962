#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fdkit {

enum class ErrorCode {
  kMalformedRow,
  kNonMonotonicTime,
  kEmptyFile,
  kNoOverlap,
  kNegativeSpacing,
  kInvalidTrack,
  kTooShort,
  kTooFewPoints,
  kTooFewSamples,
  kDegenerateInput,
  kInvalidAlpha,
  kInvalidArgument,
  kRankDeficient,
  kEmptyRange,
  kNonPositiveParams,
  kDiverged,
  kNoConvergence,
  kInvalidSpec,
  kEmpty,
  kIoError,
  kConfig,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library. `row()` carries the 1-based data row
// for parse errors and `time()` the offending timestamp where one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  Error(ErrorCode code, const std::string& what, std::size_t row);
  Error(ErrorCode code, const std::string& what, double time);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> row() const noexcept { return row_; }
  std::optional<double> time() const noexcept { return time_; }

  // Input/data problems as opposed to internal faults; the CLI maps these to
  // exit code 2.
  bool is_data_error() const noexcept;

 private:
  ErrorCode code_;
  std::optional<std::size_t> row_;
  std::optional<double> time_;
};

}  // namespace fdkit
