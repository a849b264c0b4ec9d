#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace clickcast {

enum class ErrorCode {
  kMalformedInput,
  kDuplicateId,
  kColorOutOfRange,
  kPositionOutOfRange,
  kEmptyMarkSpace,
  kEmptyLog,
  kUnknownMark,
  kInvalidParams,
  kInvalidConfiguration,
  kOutOfSequence,
  kGridTooLarge,
  kEmptyColorClass,
};

// Stable machine-readable name, e.g. "UNKNOWN_MARK".
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace clickcast
