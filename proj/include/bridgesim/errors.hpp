#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bridgesim {

// Trajectory or batch state stopped being finite (overflow/NaN in an SDE step).
struct NonFiniteState : std::runtime_error {
  explicit NonFiniteState(const std::string& what) : std::runtime_error(what) {}
};

// Backward-information matrix could not be inverted even after jitter escalation.
struct SingularMdag : std::runtime_error {
  explicit SingularMdag(const std::string& what) : std::runtime_error(what) {}
};

// Every path in a batch blew up; there is nothing to average.
struct BatchFailure : std::runtime_error {
  explicit BatchFailure(const std::string& what) : std::runtime_error(what) {}
};

// Histogram comparison across different bin edges.
struct BinMismatch : std::runtime_error {
  explicit BinMismatch(const std::string& what) : std::runtime_error(what) {}
};

// An analytics reduction was handed nothing to reduce.
struct EmptyInput : std::runtime_error {
  explicit EmptyInput(const std::string& what) : std::runtime_error(what) {}
};

// Config file is not syntactically valid JSON (or unreadable).
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Config/argument validation. Carries every problem found, not just the first.
struct ValidationError : std::runtime_error {
  std::vector<std::string> issues;
  explicit ValidationError(std::vector<std::string> list)
      : std::runtime_error(join(list)), issues(std::move(list)) {}
  explicit ValidationError(const std::string& one)
      : ValidationError(std::vector<std::string>{one}) {}

 private:
  static std::string join(const std::vector<std::string>& list) {
    std::string s = "validation failed:";
    for (const auto& e : list) s += "\n  " + e;
    return s;
  }
};

}  // namespace bridgesim
