#pragma once

#include <stdexcept>
#include <string>

namespace fastspline {

// Mirrors fs_status in the C header; the C layer maps one onto the other.
enum class ErrorKind {
  InvalidArgument = 1,
  Parse,
  Validation,
  Checksum,
  Version,
  Mismatch,
  Budget,
  Io,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace fastspline
