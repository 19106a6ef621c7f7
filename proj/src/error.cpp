#include "valence/error.hpp"

namespace valence {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kOutOfBounds: return "out_of_bounds";
    case ErrorCode::kTooShort: return "too_short";
    case ErrorCode::kNoPeaks: return "no_peaks";
    case ErrorCode::kTrialRejected: return "trial_rejected";
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kNumerical: return "numerical";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace valence
