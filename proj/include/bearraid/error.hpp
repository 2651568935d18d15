#pragma once

#include <stdexcept>
#include <string>

namespace bearraid {

/// Raised for malformed or invalid input data. The CLI maps it to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A CSV row that failed parsing or validation; carries the 1-based file line.
class RowError : public InputError {
 public:
  RowError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A numerical fit that could not be produced from the supplied data.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bearraid
