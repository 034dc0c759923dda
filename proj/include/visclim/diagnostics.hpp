#pragma once

// Norms, perturbation extraction, and error measures on 2D strip fields.
//
// The scaled-frame norms weight the plain-frame Sobolev pieces by powers of
// the viscosity parameter: the squared scaled H2 norm is
//   eps^-2 |f|_L2^2 + |grad f|_L2^2 + eps^2 |D^2 f|_L2^2,
// which is the L2(H2) norm after the change of variables y = x / eps.
// All reductions are deterministic: serial sums per x1-row, then a pairwise
// sum over the row results, independent of thread count.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "visclim/detail/parallel.hpp"
#include "visclim/errors.hpp"
#include "visclim/field2d.hpp"
#include "visclim/gas.hpp"

namespace visclim {

enum class NormKind { L1, L2, Linf, H1, H2 };

namespace detail {

inline void require_field_size(const std::vector<double>& f, const Grid2D& g) {
  if (f.size() != g.cells()) {
    throw std::invalid_argument("field size does not match grid: " +
                                std::to_string(f.size()) + " vs " +
                                std::to_string(g.cells()));
  }
}

// d/dx1: centered in the interior, one-sided second order at the strip ends.
inline std::vector<double> deriv_x1(const std::vector<double>& f, const Grid2D& g) {
  require_field_size(f, g);
  const std::size_t nx = g.x.n, ny = g.y.n;
  if (nx < 4) throw std::invalid_argument("deriv_x1: need at least 4 cells in x1");
  const double h = g.x.h;
  std::vector<double> d(f.size());
  for (std::size_t j = 0; j < ny; ++j) {
    d[g.idx(0, j)] = (-3.0 * f[g.idx(0, j)] + 4.0 * f[g.idx(1, j)] - f[g.idx(2, j)]) / (2.0 * h);
    d[g.idx(nx - 1, j)] = (3.0 * f[g.idx(nx - 1, j)] - 4.0 * f[g.idx(nx - 2, j)] +
                           f[g.idx(nx - 3, j)]) /
                          (2.0 * h);
  }
  for (std::size_t i = 1; i + 1 < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      d[g.idx(i, j)] = (f[g.idx(i + 1, j)] - f[g.idx(i - 1, j)]) / (2.0 * h);
  return d;
}

inline std::vector<double> deriv_x1x1(const std::vector<double>& f, const Grid2D& g) {
  require_field_size(f, g);
  const std::size_t nx = g.x.n, ny = g.y.n;
  if (nx < 4) throw std::invalid_argument("deriv_x1x1: need at least 4 cells in x1");
  const double h2 = g.x.h * g.x.h;
  std::vector<double> d(f.size());
  for (std::size_t j = 0; j < ny; ++j) {
    d[g.idx(0, j)] = (2.0 * f[g.idx(0, j)] - 5.0 * f[g.idx(1, j)] + 4.0 * f[g.idx(2, j)] -
                      f[g.idx(3, j)]) /
                     h2;
    d[g.idx(nx - 1, j)] = (2.0 * f[g.idx(nx - 1, j)] - 5.0 * f[g.idx(nx - 2, j)] +
                           4.0 * f[g.idx(nx - 3, j)] - f[g.idx(nx - 4, j)]) /
                          h2;
  }
  for (std::size_t i = 1; i + 1 < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      d[g.idx(i, j)] =
          (f[g.idx(i + 1, j)] - 2.0 * f[g.idx(i, j)] + f[g.idx(i - 1, j)]) / h2;
  return d;
}

// d/dx2 on the periodic torus direction, centered everywhere.
inline std::vector<double> deriv_x2(const std::vector<double>& f, const Grid2D& g) {
  require_field_size(f, g);
  const std::size_t nx = g.x.n, ny = g.y.n;
  if (ny < 3) throw std::invalid_argument("deriv_x2: need at least 3 cells in x2");
  const double h = g.y.h;
  std::vector<double> d(f.size());
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t jp = (j + 1 == ny) ? 0 : j + 1;
      const std::size_t jm = (j == 0) ? ny - 1 : j - 1;
      d[g.idx(i, j)] = (f[g.idx(i, jp)] - f[g.idx(i, jm)]) / (2.0 * h);
    }
  }
  return d;
}

inline std::vector<double> deriv_x2x2(const std::vector<double>& f, const Grid2D& g) {
  require_field_size(f, g);
  const std::size_t nx = g.x.n, ny = g.y.n;
  if (ny < 3) throw std::invalid_argument("deriv_x2x2: need at least 3 cells in x2");
  const double h2 = g.y.h * g.y.h;
  std::vector<double> d(f.size());
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t jp = (j + 1 == ny) ? 0 : j + 1;
      const std::size_t jm = (j == 0) ? ny - 1 : j - 1;
      d[g.idx(i, j)] = (f[g.idx(i, jp)] - 2.0 * f[g.idx(i, j)] + f[g.idx(i, jm)]) / h2;
    }
  }
  return d;
}

// Midpoint-rule integral of |f|^p over the strip, p in {1, 2}.
inline double integral_abs_pow(const std::vector<double>& f, const Grid2D& g, int p) {
  const std::size_t nx = g.x.n, ny = g.y.n;
  std::vector<double> rows(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
      const double v = f[g.idx(i, j)];
      s += (p == 1) ? std::abs(v) : v * v;
    }
    rows[i] = s;
  }
  return pairwise_sum(rows.data(), rows.size()) * g.x.h * g.y.h;
}

inline double l2_sq(const std::vector<double>& f, const Grid2D& g) {
  return integral_abs_pow(f, g, 2);
}

inline double max_abs(const std::vector<double>& f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

inline double grad_sq(const std::vector<double>& f, const Grid2D& g) {
  return l2_sq(deriv_x1(f, g), g) + l2_sq(deriv_x2(f, g), g);
}

// Sum over the three second-derivative multi-indices, the mixed one once.
inline double hess_sq(const std::vector<double>& f, const Grid2D& g) {
  return l2_sq(deriv_x1x1(f, g), g) + l2_sq(deriv_x2(deriv_x1(f, g), g), g) +
         l2_sq(deriv_x2x2(f, g), g);
}

}  // namespace detail

inline double field_norm(const std::vector<double>& f, const Grid2D& g, NormKind kind) {
  detail::require_field_size(f, g);
  switch (kind) {
    case NormKind::L1:
      return detail::integral_abs_pow(f, g, 1);
    case NormKind::L2:
      return std::sqrt(detail::l2_sq(f, g));
    case NormKind::Linf:
      return detail::max_abs(f);
    case NormKind::H1:
      return std::sqrt(detail::l2_sq(f, g) + detail::grad_sq(f, g));
    case NormKind::H2:
      return std::sqrt(detail::l2_sq(f, g) + detail::grad_sq(f, g) + detail::hess_sq(f, g));
  }
  throw std::invalid_argument("field_norm: unknown norm kind");
}

// Same norms after the self-similar change of variables y = x / eps.
inline double field_norm_scaled(const std::vector<double>& f, const Grid2D& g, NormKind kind,
                                double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("field_norm_scaled: need eps > 0");
  detail::require_field_size(f, g);
  switch (kind) {
    case NormKind::L1:
      return detail::integral_abs_pow(f, g, 1) / (eps * eps);
    case NormKind::L2:
      return std::sqrt(detail::l2_sq(f, g)) / eps;
    case NormKind::Linf:
      return detail::max_abs(f);
    case NormKind::H1:
      return std::sqrt(detail::l2_sq(f, g) / (eps * eps) + detail::grad_sq(f, g));
    case NormKind::H2:
      return std::sqrt(detail::l2_sq(f, g) / (eps * eps) + detail::grad_sq(f, g) +
                       eps * eps * detail::hess_sq(f, g));
  }
  throw std::invalid_argument("field_norm_scaled: unknown norm kind");
}

// Deviation of a simulated field from the background wave, in primitive
// variables: phi = rho - rho_tilde, psi_i = u_i - u_tilde_i.
struct PerturbationField {
  Grid2D grid;
  std::vector<double> phi;
  std::vector<double> psi1;
  std::vector<double> psi2;
};

// rho_tilde and u1_tilde are x1-profiles broadcast across the torus direction.
inline PerturbationField extract_perturbation(const Field2D& field,
                                              const std::vector<double>& rho_tilde,
                                              const std::vector<double>& u1_tilde) {
  const Grid2D& g = field.grid;
  if (rho_tilde.size() != g.x.n || u1_tilde.size() != g.x.n)
    throw std::invalid_argument("extract_perturbation: profile arrays must have x1 length");
  PerturbationField p;
  p.grid = g;
  p.phi.resize(g.cells());
  p.psi1.resize(g.cells());
  p.psi2.resize(g.cells());
  for (std::size_t i = 0; i < g.x.n; ++i) {
    for (std::size_t j = 0; j < g.y.n; ++j) {
      const std::size_t c = g.idx(i, j);
      const double rho = field.rho[c];
      detail::require_positive_density(rho);
      p.phi[c] = rho - rho_tilde[i];
      p.psi1[c] = field.m1[c] / rho - u1_tilde[i];
      p.psi2[c] = field.m2[c] / rho;
    }
  }
  return p;
}

inline double perturbation_h2_scaled(const PerturbationField& p, double eps) {
  const double a = field_norm_scaled(p.phi, p.grid, NormKind::H2, eps);
  const double b = field_norm_scaled(p.psi1, p.grid, NormKind::H2, eps);
  const double c = field_norm_scaled(p.psi2, p.grid, NormKind::H2, eps);
  return std::sqrt(a * a + b * b + c * c);
}

// Relative pressure potential (p(rho) - p(rt) - p'(rt)(rho - rt)) / ((gamma-1) rho).
// Nonnegative by convexity of the pressure law; quadratic near rho = rt.
inline double potential_energy(const GasLaw& law, double rho, double rho_tilde) {
  detail::require_positive_density(rho);
  detail::require_positive_density(rho_tilde);
  const double dp = pressure(law, rho) - pressure(law, rho_tilde);
  const double p_prime = std::pow(rho_tilde, law.gamma - 1.0);
  return (dp - p_prime * (rho - rho_tilde)) / ((law.gamma - 1.0) * rho);
}

// Largest pointwise distance, over snapshots with t in [h, T] and over all
// cells, between (rho, u1, u2) and the self-similar fan (rho, u1, 0)(x1 / t).
inline double sup_error_vs_fan(const std::vector<double>& times,
                               const std::vector<Field2D>& fields, const GasLaw& law,
                               const RiemannEndStates& ends, double h, double T) {
  if (times.size() != fields.size())
    throw std::invalid_argument("sup_error_vs_fan: times and fields length mismatch");
  if (!(h > 0.0) || !(T >= h))
    throw std::invalid_argument("sup_error_vs_fan: need 0 < h <= T");
  const double lo = h * (1.0 - 1e-12), hi = T * (1.0 + 1e-12);
  double sup = 0.0;
  bool seen = false;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    if (t < lo || t > hi) continue;
    seen = true;
    const Grid2D& g = fields[k].grid;
    for (std::size_t i = 0; i < g.x.n; ++i) {
      const GasState1D fan = exact_fan_eval(law, ends, g.x.center(i) / t);
      for (std::size_t j = 0; j < g.y.n; ++j) {
        const std::size_t c = g.idx(i, j);
        const double rho = fields[k].rho[c];
        detail::require_positive_density(rho);
        sup = std::max(sup, std::abs(rho - fan.rho));
        sup = std::max(sup, std::abs(fields[k].m1[c] / rho - fan.u1));
        sup = std::max(sup, std::abs(fields[k].m2[c] / rho));
      }
    }
  }
  if (!seen)
    throw std::invalid_argument("sup_error_vs_fan: no snapshot inside the time window");
  return sup;
}

}  // namespace visclim
