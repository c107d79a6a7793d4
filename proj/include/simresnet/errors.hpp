#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace simresnet {

// Parse failure in an input file; message carries the 1-based row number.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A channel with max == min cannot be min-max normalized.
class DegenerateDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Constant positive sample, log-std 0: no lognormal fit exists.
class DegenerateFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingDivergedError : public std::runtime_error {
 public:
  TrainingDivergedError(const std::string& what, std::size_t iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

// All elastic stresses vanish: the safety factor has no finite maximum.
class UnboundedAlphaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Instance too large or equilibrium not diagonal: outside brute-force scope.
class OracleScopeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace simresnet
