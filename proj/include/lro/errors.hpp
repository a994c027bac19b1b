#pragma once

#include <stdexcept>
#include <string>

namespace lro {

/// Charge-basis cutoff too small for the requested transmon levels.
class CutoffTooSmallError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fock cutoff beyond the range where the Laguerre recurrence stays finite.
class FockRangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested Bohr-Sommerfeld level lies outside the separatrix.
class UnboundStateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The stochastic step renormalised the state by more than the allowed
/// fraction; dt is too large.
class NormDivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user configuration. `path` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace lro
