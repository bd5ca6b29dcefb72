#include "rhc/error.hpp"

namespace rhc {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedCode: return "malformed_code";
    case ErrorCode::kUnknownCode: return "unknown_code";
    case ErrorCode::kDegenerateLevel: return "degenerate_level";
    case ErrorCode::kDepthOutOfRange: return "depth_out_of_range";
    case ErrorCode::kInvalidTaxonomy: return "invalid_taxonomy";
    case ErrorCode::kMissingPlaceholder: return "missing_placeholder";
    case ErrorCode::kLengthMismatch: return "length_mismatch";
    case ErrorCode::kShapeMismatch: return "shape_mismatch";
    case ErrorCode::kEmptyInput: return "empty_input";
    case ErrorCode::kInsufficientCorpus: return "insufficient_corpus";
    case ErrorCode::kNonIntegralTestCount: return "non_integral_test_count";
    case ErrorCode::kBadGoldCode: return "bad_gold_code";
    case ErrorCode::kBatchTooLarge: return "batch_too_large";
    case ErrorCode::kInvalidConfig: return "invalid_config";
    case ErrorCode::kInvalidInput: return "invalid_input";
    case ErrorCode::kIo: return "io_error";
  }
  return "unknown";
}

}  // namespace rhc
