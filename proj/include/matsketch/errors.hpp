#pragma once

#include <stdexcept>
#include <string>

namespace matsketch {

// Parameter / usage errors (bad k, negative weights, invalid config values).
// Maps to CLI exit code 2.
class parameter_error : public std::invalid_argument {
 public:
  explicit parameter_error(const std::string& what) : std::invalid_argument(what) {}
};

// Shape mismatches between operands.
class dimension_error : public std::invalid_argument {
 public:
  explicit dimension_error(const std::string& what) : std::invalid_argument(what) {}
};

// Two sketches that cannot be combined (seed, kind, k, or class mismatch).
// Maps to CLI exit code 3.
class coordination_error : public std::runtime_error {
 public:
  explicit coordination_error(const std::string& what) : std::runtime_error(what) {}
};

// File and format failures (missing file, malformed MatrixMarket/CSV/sketch
// payload). Maps to CLI exit code 4.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace matsketch
