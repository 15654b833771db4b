#ifndef ALLELO_ERRORS_HPP
#define ALLELO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace allelo {

// Process exit codes used by the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,       // generic / test failure
  kExitConfigError = 2,   // invalid configuration or precondition
  kExitInvariant = 3,     // a runtime invariant check tripped
  kExitResourceCap = 4,   // a configured memory / event cap was exceeded
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct InvariantViolation : std::runtime_error {
  explicit InvariantViolation(const std::string& what)
      : std::runtime_error(what) {}
};

struct ResourceCapError : std::runtime_error {
  explicit ResourceCapError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace allelo

#endif
