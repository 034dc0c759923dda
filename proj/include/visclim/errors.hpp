#pragma once

#include <stdexcept>
#include <string>

namespace visclim {

/// Invalid configuration (rejected before any computation starts).
struct config_error : std::invalid_argument {
  explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure during a run (non-positive density, NaN, blow-up).
struct run_error : std::runtime_error {
  explicit run_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace visclim
