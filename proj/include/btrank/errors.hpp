#pragma once

#include <stdexcept>
#include <string>

namespace btrank {

// Bad flags, malformed config files, infeasible requests. CLI exit code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Parse failures, invariant violations, unknown ids, degenerate statistics.
// CLI exit code 2.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Remote judge could not be reached or kept failing. CLI exit code 3.
struct TransportError : std::runtime_error {
  explicit TransportError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace btrank
