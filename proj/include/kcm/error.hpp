#pragma once

#include <stdexcept>
#include <string>

namespace kcm {

// Error categories map 1:1 onto the CLI / C-API exit codes.
enum class ErrorKind {
  Usage = 1,    // bad arguments, invalid configuration
  Data = 2,     // unparseable or degenerate input data
  Numeric = 3,  // solver failure, degenerate statistic
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_usage(const std::string& msg) {
  throw Error(ErrorKind::Usage, msg);
}
[[noreturn]] inline void throw_data(const std::string& msg) {
  throw Error(ErrorKind::Data, msg);
}
[[noreturn]] inline void throw_numeric(const std::string& msg) {
  throw Error(ErrorKind::Numeric, msg);
}

}  // namespace kcm
