#include "fdkit/error.hpp"

namespace fdkit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kNonMonotonicTime: return "NonMonotonicTime";
    case ErrorCode::kEmptyFile: return "EmptyFile";
    case ErrorCode::kNoOverlap: return "NoOverlap";
    case ErrorCode::kNegativeSpacing: return "NegativeSpacing";
    case ErrorCode::kInvalidTrack: return "InvalidTrack";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kInvalidAlpha: return "InvalidAlpha";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kEmptyRange: return "EmptyRange";
    case ErrorCode::kNonPositiveParams: return "NonPositiveParams";
    case ErrorCode::kDiverged: return "Diverged";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kEmpty: return "Empty";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kConfig: return "Config";
  }
  return "Unknown";
}

namespace {
std::string decorate(ErrorCode code, const std::string& what) {
  return std::string(to_string(code)) + ": " + what;
}
}  // namespace

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(decorate(code, what)), code_(code) {}

Error::Error(ErrorCode code, const std::string& what, std::size_t row)
    : std::runtime_error(decorate(code, what + " (row " + std::to_string(row) + ")")),
      code_(code),
      row_(row) {}

Error::Error(ErrorCode code, const std::string& what, double time)
    : std::runtime_error(decorate(code, what + " (t=" + std::to_string(time) + " s)")),
      code_(code),
      time_(time) {}

bool Error::is_data_error() const noexcept {
  switch (code_) {
    case ErrorCode::kDiverged:
    case ErrorCode::kNoConvergence:
      return false;
    default:
      return true;
  }
}

}  // namespace fdkit
