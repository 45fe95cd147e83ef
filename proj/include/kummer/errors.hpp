#pragma once

#include <stdexcept>
#include <string>

namespace kummer {

enum class ErrorKind {
  Usage,
  Contract,
  DivisionByZero,
  Degenerate,
  Structure,
  InvalidKernel,
  Sampling,
  Precision,
  Conjecture,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

const char* error_name(ErrorKind k);

// Process exit status used by the CLI and the C API.
int error_code(ErrorKind k);

[[noreturn]] inline void fail(ErrorKind k, const std::string& what) { throw Error(k, what); }

}  // namespace kummer
