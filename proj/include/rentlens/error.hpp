#pragma once

#include <stdexcept>
#include <string>

namespace rentlens {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input bytes (BLIF, .net XML, arch files). Exit code 2 territory.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line = 0, int column = 0)
      : Error(format(msg, line, column)), line_(line), column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& msg, int line, int column) {
    if (line <= 0) {
      return msg;
    }
    std::string out = "line " + std::to_string(line);
    if (column > 0) {
      out += ", col " + std::to_string(column);
    }
    return out + ": " + msg;
  }

  int line_;
  int column_;
};

// Structurally valid input that cannot be analyzed (bad domain values,
// degenerate fits, impossible constraints). Exit code 3 territory.
class AnalysisError : public Error {
 public:
  explicit AnalysisError(const std::string& msg) : Error(msg) {}
};

class DomainError : public AnalysisError {
 public:
  explicit DomainError(const std::string& msg) : AnalysisError(msg) {}
};

}  // namespace rentlens
