#pragma once

#include <stdexcept>
#include <string>

namespace ddcc {

enum class ErrorKind {
  Parse,       // malformed document
  Validation,  // well-formed but violates an invariant
  OutOfRange,  // index or argument outside its legal range
  Guard,       // work limit exceeded (brute-force oracle)
  Io,
  Config,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; `kind()` is what callers branch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ddcc

namespace ddcc {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ddcc
