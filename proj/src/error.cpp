#include "gsv/error.hpp"

namespace gsv {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimension: return "DIMENSION";
    case ErrorCode::kStrategy: return "STRATEGY";
    case ErrorCode::kInvalidSource: return "INVALID_SOURCE";
    case ErrorCode::kParse: return "PARSE";
    case ErrorCode::kSubsetLimit: return "SUBSET_LIMIT";
    case ErrorCode::kNotHnk: return "NOT_HNK";
    case ErrorCode::kEpsilonTooLarge: return "EPSILON_TOO_LARGE";
    case ErrorCode::kMLimit: return "M_LIMIT";
    case ErrorCode::kTreeLimit: return "TREE_LIMIT";
    case ErrorCode::kEnumLimit: return "ENUM_LIMIT";
    case ErrorCode::kNoQualifyingDie: return "NO_QUALIFYING_DIE";
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
  }
  return "UNKNOWN";
}

}  // namespace gsv
