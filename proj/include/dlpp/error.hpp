#pragma once

#include <stdexcept>
#include <string>

namespace dlpp {

enum class ErrorCode {
  invalid_parameter,
  time_regression,
  out_of_range,
  instance_too_large,
  kind_mismatch,
  domain_error,
  config_error,
};

/// Single exception type for all library failures; the code says which clause was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace dlpp
