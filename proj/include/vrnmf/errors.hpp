#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vrnmf {

// Shape or index incompatibility between operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A value that violates a documented domain (negative entry, alpha outside
// (0,1], empty sample set, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite cost or iterate detected while solving.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, int epoch)
      : std::runtime_error(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

// Malformed matrix, image, trace or config file. Line and column are 1-based;
// 0 means "not applicable".
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(decorate(what, line, column)), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string decorate(const std::string& what, std::size_t line, std::size_t column) {
    if (line == 0) return what;
    std::string out = what + " (line " + std::to_string(line);
    if (column != 0) out += ", column " + std::to_string(column);
    return out + ")";
  }
  std::size_t line_;
  std::size_t column_;
};

// Benchmark configuration schema violation; key_path is dotted, e.g.
// "solvers[1].batch_size".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key_path, const std::string& what)
      : std::runtime_error(key_path + ": " + what), key_path_(key_path) {}
  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

}  // namespace vrnmf
