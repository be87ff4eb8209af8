#pragma once

#include <stdexcept>
#include <string>

namespace wmcf {

// Base class for all library errors.
struct error : std::runtime_error {
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// A query point or state value left the open domain of the warping function.
struct domain_exit_error : error {
  using error::error;
};

// Incompatible dimension / multiplicity combination for a symmetric space.
struct dimension_error : error {
  using error::error;
};

// An argument violated a documented precondition.
struct precondition_error : error {
  using error::error;
};

// The admissibility hypothesis behind an analytic bound does not hold.
struct hypothesis_error : error {
  using error::error;
};

// A computation produced a non-finite value.
struct nonfinite_error : error {
  using error::error;
};

// Malformed or invalid run configuration document.
struct config_error : error {
  using error::error;
};

// Filesystem failure while reading inputs or writing outputs.
struct io_error : error {
  using error::error;
};

// Trajectory metadata conflicts with the requested verification scenario.
struct scenario_mismatch_error : error {
  using error::error;
};

}  // namespace wmcf
