#pragma once

#include <stdexcept>
#include <string>

namespace cohomqe {

// Every failure raised by the library carries a stable machine-readable kind
// (e.g. "DegreeTooHigh", "NonLinearAtom") next to the human message. The CLI
// serializes both into its structured error object.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Parse failures keep the 1-based source position.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, int line, int column)
      : Error("SyntaxError", message + " at " + std::to_string(line) + ":" +
                                 std::to_string(column)),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace cohomqe
