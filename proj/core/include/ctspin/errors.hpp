#pragma once

#include <stdexcept>
#include <string>

namespace ctspin {

// Raised when user-supplied input (config file, CLI values, requested
// lattice/sample sizes) is invalid.  The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a computation cannot complete (fit has nothing to fit on,
// cluster expansion cannot reach the accepted-configuration target, I/O
// failures).  The CLI maps this to exit code 1.
class EngineError : public std::runtime_error {
 public:
  explicit EngineError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ctspin
