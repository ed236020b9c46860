#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gsv {

enum class ErrorCode {
  kDimension,
  kStrategy,
  kInvalidSource,
  kParse,
  kSubsetLimit,
  kNotHnk,
  kEpsilonTooLarge,
  kMLimit,
  kTreeLimit,
  kEnumLimit,
  kNoQualifyingDie,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as GsvError; callers branch on code().
class GsvError : public std::runtime_error {
 public:
  GsvError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gsv
