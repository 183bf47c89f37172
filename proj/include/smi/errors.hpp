#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace smi {

// Bad call arguments: shape mismatches, unknown ids, out-of-range indices.
struct InvalidInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unsatisfiable or malformed configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed on-disk data; byte_offset points at the offending field.
struct FormatError : std::runtime_error {
  FormatError(const std::string& msg, size_t offset)
      : std::runtime_error(msg + " (byte offset " + std::to_string(offset) + ")"),
        byte_offset(offset) {}
  size_t byte_offset;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Gradient descent hit a non-finite cost; carries the last finite iterate.
struct NumericalFailure : std::runtime_error {
  NumericalFailure(const std::string& msg, std::vector<double> iterate)
      : std::runtime_error(msg), last_finite_iterate(std::move(iterate)) {}
  std::vector<double> last_finite_iterate;
};

}  // namespace smi
