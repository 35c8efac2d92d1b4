#pragma once

#include <stdexcept>
#include <string>

namespace fbd {

/// Error categories. The CLI maps each one to its own exit status.
enum class ErrorKind {
  usage = 2,
  file = 3,
  syntax = 4,
  semantic = 5,
  analysis = 6,
  timeout = 7,
  blow_up = 8,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Syntax error carrying the 1-based source position.
class SyntaxError : public Error {
public:
  SyntaxError(int line, int column, const std::string& message)
      : Error(ErrorKind::syntax,
              std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

private:
  int line_;
  int column_;
};

class SemanticError : public Error {
public:
  explicit SemanticError(const std::string& what) : Error(ErrorKind::semantic, what) {}
};

class AnalysisError : public Error {
public:
  explicit AnalysisError(const std::string& what) : Error(ErrorKind::analysis, what) {}
};

}  // namespace fbd
