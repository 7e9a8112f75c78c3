#pragma once

#include <stdexcept>
#include <string>

namespace perfsim {

// Thrown when an operation is asked for a configuration it does not support
// (e.g. the closed-form noisy risk with a non-unit cost, or repeated gradient
// descent on a model whose aggregate is not smooth).
class UnsupportedConfiguration : public std::runtime_error {
 public:
  explicit UnsupportedConfiguration(const std::string& what)
      : std::runtime_error(what) {}
};

// Configuration-file errors carry the offending key path.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace perfsim
