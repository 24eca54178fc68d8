#pragma once

#include <stdexcept>
#include <string>

namespace prophet {

/// Failure categories; the CLI maps them onto exit codes.
enum class ErrorKind {
  validation,  ///< bad input or violated precondition
  numerical,   ///< a numerical procedure failed to converge or diverged
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_validation(const std::string& what) {
  throw Error(ErrorKind::validation, what);
}

[[noreturn]] inline void fail_numerical(const std::string& what) {
  throw Error(ErrorKind::numerical, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail_validation(what);
}

}  // namespace prophet
