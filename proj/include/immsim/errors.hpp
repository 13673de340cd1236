#pragma once

#include <stdexcept>

namespace immsim {

// Error categories; the CLI maps them onto exit codes
// (ConfigError -> 2, SimulationError -> 3, IoError -> 4).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Linear solve failed: singular or numerically unusable network.
class SolverError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

// The within-pulse fixed point did not settle (inconsistent thresholds).
class OscillationError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

// A clone destination held something other than HRS before the pulse.
class DestinationNotInitialized : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

}  // namespace immsim
