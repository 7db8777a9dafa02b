#pragma once

#include <stdexcept>
#include <string>

namespace crp {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  InfeasibleZf,
  NotPositiveDefinite,
  IllConditioned,
  SingularKkt,
  LineSearchStalled,
  MaxIterations,
  SizeGuard,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (the Monte-Carlo harness in particular) can classify it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace crp
