#include "clickcast/errors.hpp"

namespace clickcast {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedInput:
      return "MALFORMED_INPUT";
    case ErrorCode::kDuplicateId:
      return "DUPLICATE_ID";
    case ErrorCode::kColorOutOfRange:
      return "COLOR_OUT_OF_RANGE";
    case ErrorCode::kPositionOutOfRange:
      return "POSITION_OUT_OF_RANGE";
    case ErrorCode::kEmptyMarkSpace:
      return "EMPTY_MARK_SPACE";
    case ErrorCode::kEmptyLog:
      return "EMPTY_LOG";
    case ErrorCode::kUnknownMark:
      return "UNKNOWN_MARK";
    case ErrorCode::kInvalidParams:
      return "INVALID_PARAMS";
    case ErrorCode::kInvalidConfiguration:
      return "INVALID_CONFIGURATION";
    case ErrorCode::kOutOfSequence:
      return "OUT_OF_SEQUENCE";
    case ErrorCode::kGridTooLarge:
      return "GRID_TOO_LARGE";
    case ErrorCode::kEmptyColorClass:
      return "EMPTY_COLOR_CLASS";
  }
  return "UNKNOWN";
}

}  // namespace clickcast
