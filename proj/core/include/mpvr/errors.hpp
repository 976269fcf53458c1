#pragma once

#include <stdexcept>
#include <string>

namespace mpvr {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user input: malformed config file, out-of-range parameter, unknown key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Timestep too coarse to resolve the requested waveform or switching pattern.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

// Numerical failure during transient simulation (blow-up, missing steady state).
class SimulationError : public Error {
 public:
  using Error::Error;
};

// A self-check invariant failed (e.g. detector window does not contain the
// fault window when soundness was requested).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace mpvr
