#pragma once

#include <stdexcept>
#include <string>

namespace mfgcrowd {

/// Invalid user-facing configuration (scenario file, builtin parameters, CLI
/// values). Messages name the offending field where one exists.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Time step too large for the velocities seen (a priori estimate or an
/// actual displacement exceeding one cell). Fatal: the schemes are invalid
/// past this point.
class CflError : public std::runtime_error {
  public:
    explicit CflError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A broken internal invariant (scheme produced garbage, shape mismatch).
/// Indicates a bug, not bad input.
class InternalError : public std::logic_error {
  public:
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace mfgcrowd
