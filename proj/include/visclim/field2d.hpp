#pragma once

// Cell-centered conservative state (rho, m1, m2) on [-L, L] x unit torus.
// Storage is row-major with the periodic x2 index fastest: data[i * ny + j].

#include <cstddef>
#include <vector>

#include "visclim/errors.hpp"
#include "visclim/grid.hpp"

namespace visclim {

struct Grid2D {
  Grid1D x;  // x1, bounded
  Grid1D y;  // x2, periodic with extent 1

  Grid2D() = default;
  Grid2D(double L, std::size_t nx, std::size_t ny) : x(-L, L, nx), y(0.0, 1.0, ny) {
    if (!(L > 0.0)) throw config_error("Grid2D: need L > 0");
  }
  std::size_t cells() const { return x.n * y.n; }
  std::size_t idx(std::size_t i, std::size_t j) const { return i * y.n + j; }
};

struct Field2D {
  Grid2D grid;
  std::vector<double> rho, m1, m2;

  Field2D() = default;
  explicit Field2D(const Grid2D& g)
      : grid(g), rho(g.cells(), 0.0), m1(g.cells(), 0.0), m2(g.cells(), 0.0) {}

  std::size_t idx(std::size_t i, std::size_t j) const { return grid.idx(i, j); }
};

}  // namespace visclim
