#pragma once

#include <stdexcept>
#include <string>

namespace medroute {

enum class ErrorKind {
  InvalidArgument,
  Io,
  Parse,
  Schema,
  Checksum,
  Version,
  Network,
  State,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool cond, ErrorKind kind, const std::string& message) {
  if (!cond) fail(kind, message);
}

}  // namespace medroute
