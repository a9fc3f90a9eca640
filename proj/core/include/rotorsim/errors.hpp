#pragma once

#include <stdexcept>
#include <string>

namespace rotorsim {

// Invalid physical or structural input (bad quantum numbers, negative
// intensity, malformed scenario config, ...).  CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A simulation invariant failed at run time (norm drift, non-convergence,
// truncation violation).  CLI exit code 3.
class SimulationError : public std::runtime_error {
 public:
  explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

// Output could not be written.  CLI exit code 4.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rotorsim
