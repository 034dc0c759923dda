#pragma once

#include <cstddef>

#include "visclim/errors.hpp"

namespace visclim {

/// Uniform 1D cell grid. Cells are centered: center(i) = x_lo + (i + 1/2) h.
struct Grid1D {
  double x_lo = 0.0;
  double h = 1.0;
  std::size_t n = 0;

  Grid1D() = default;
  Grid1D(double x_lo_, double x_hi, std::size_t n_) : x_lo(x_lo_), n(n_) {
    if (n_ == 0 || !(x_hi > x_lo_)) throw config_error("Grid1D: need n > 0 and x_hi > x_lo");
    h = (x_hi - x_lo_) / static_cast<double>(n_);
  }

  double center(std::size_t i) const { return x_lo + (static_cast<double>(i) + 0.5) * h; }
  double face(std::size_t i) const { return x_lo + static_cast<double>(i) * h; }
  double x_hi() const { return x_lo + static_cast<double>(n) * h; }
};

}  // namespace visclim
