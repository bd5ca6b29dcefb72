#ifndef RHC_ERROR_HPP_
#define RHC_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace rhc {

enum class ErrorCode {
  kMalformedCode,
  kUnknownCode,
  kDegenerateLevel,
  kDepthOutOfRange,
  kInvalidTaxonomy,
  kMissingPlaceholder,
  kLengthMismatch,
  kShapeMismatch,
  kEmptyInput,
  kInsufficientCorpus,
  kNonIntegralTestCount,
  kBadGoldCode,
  kBatchTooLarge,
  kInvalidConfig,
  kInvalidInput,
  kIo,
};

// Stable snake_case name, used in wire responses and CLI error lines.
std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rhc

#endif  // RHC_ERROR_HPP_
