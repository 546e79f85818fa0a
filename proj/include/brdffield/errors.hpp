#pragma once

#include <stdexcept>
#include <string>

namespace brdffield {

// Bad user configuration (unknown keys, invalid combinations).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or unusable input data (files, fixtures, empty sources).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Geometry that cannot be transformed (antipodal pairs, below-horizon).
struct DegenerateInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Optimization produced a non-finite loss.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace brdffield
