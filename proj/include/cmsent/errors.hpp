#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cmsent {

// Malformed input data (corpus, dictionary, config). Carries a 1-based line
// number when one is known, 0 otherwise.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model file problems: version mismatch, corruption, truncation.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training preconditions and numerical failures.
class TrainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cmsent
