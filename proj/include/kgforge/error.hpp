#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgforge {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A term violated its construction invariants (relative IRI, bad label, ...).
class InvalidTerm : public Error {
 public:
  using Error::Error;
};

// Syntax error in one of the text formats. `line` and `column` are 1-based;
// zero means the position is not known.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0,
             std::size_t column = 0)
      : Error(format(message, line, column)),
        message_(message),
        line_(line),
        column_(column) {}

  const std::string& message() const noexcept { return message_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& message, std::size_t line,
                            std::size_t column) {
    if (line == 0) return message;
    std::string out = "line " + std::to_string(line);
    if (column != 0) out += ", column " + std::to_string(column);
    return out + ": " + message;
  }

  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace kgforge
