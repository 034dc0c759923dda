#pragma once

// Corrected approximate wave: the background rarefaction profile plus the
// first-order correction carried by the hyperbolic wave field,
//   rho_tilde = rho_bar + d1,  m1_tilde = m1_bar + d2,  u1_tilde = m1_tilde / rho_tilde,
// together with perturbed two-dimensional initial data built from its t = 0
// slice. The correction vanishes at t = 0, so that slice coincides with the
// plain profile on the grid.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "visclim/diagnostics.hpp"
#include "visclim/errors.hpp"
#include "visclim/field2d.hpp"
#include "visclim/hyperbolic_wave.hpp"
#include "visclim/rarefaction.hpp"

namespace visclim {

struct AnsatzProfile {
  RarefactionProfile profile;
  HyperbolicWaveField wave;
  // Indexed [time][cell] on wave.grid, at the times recorded in wave.times.
  std::vector<std::vector<double>> rho_tilde;
  std::vector<std::vector<double>> m1_tilde;
  std::vector<std::vector<double>> u1_tilde;
};

// The corrected density must stay inside a band around the end states; a
// violation means the correction is too large for the chosen viscosity.
inline AnsatzProfile build_ansatz(const RarefactionProfile& profile, HyperbolicWaveField wave) {
  AnsatzProfile a{profile, std::move(wave), {}, {}, {}};
  const Grid1D& grid = a.wave.grid;
  const std::size_t steps = a.wave.times.size();
  if (steps == 0) throw std::invalid_argument("build_ansatz: wave holds no recorded times");
  const double rho_minus = std::min(a.profile.ends.left.rho, a.profile.ends.right.rho);
  const double rho_plus = std::max(a.profile.ends.left.rho, a.profile.ends.right.rho);
  const double lo = 0.75 * rho_minus;
  const double hi = rho_plus + 0.25 * rho_minus;
  a.rho_tilde.assign(steps, std::vector<double>(grid.n));
  a.m1_tilde.assign(steps, std::vector<double>(grid.n));
  a.u1_tilde.assign(steps, std::vector<double>(grid.n));
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = a.wave.times[k];
    for (std::size_t i = 0; i < grid.n; ++i) {
      const ProfilePointValue q = a.profile.eval(t, grid.center(i));
      const double rho = q.rho_bar + a.wave.d1[k][i];
      if (!(rho >= lo && rho <= hi)) {
        throw config_error(
            "build_ansatz: corrected density leaves the admissible band; "
            "epsilon too large for this wave strength");
      }
      a.rho_tilde[k][i] = rho;
      a.m1_tilde[k][i] = q.m1_bar + a.wave.d2[k][i];
      a.u1_tilde[k][i] = a.m1_tilde[k][i] / rho;
    }
  }
  return a;
}

// Discrete residuals (mass, momentum) of the balance laws the corrected wave
// satisfies: centered differences in time over the recorded snapshots and in
// space over the grid. The momentum residual combines the analytic profile
// balance with the discrete correction flux
//   (p'(rho_bar) - u1_bar^2) d1 + 2 u1_bar d2
// and the viscous forcing (2 mu + lam) eps u1_bar_xx. Both residuals vanish
// in the continuum, so they shrink at the discretization order.
inline std::array<double, 2> momentum_residual(const AnsatzProfile& a, double t, double x1) {
  const std::vector<double>& times = a.wave.times;
  const Grid1D& grid = a.wave.grid;
  std::size_t k = times.size();
  for (std::size_t m = 0; m < times.size(); ++m) {
    if (std::abs(times[m] - t) <= 1e-12 * std::max(1.0, std::abs(t))) {
      k = m;
      break;
    }
  }
  if (k >= times.size() || k == 0 || k + 1 >= times.size())
    throw std::invalid_argument("momentum_residual: t must be an interior output time");
  const double pos = (x1 - grid.x_lo) / grid.h - 0.5;
  const long long ii = std::llround(pos);
  if (ii < 1 || ii + 1 >= static_cast<long long>(grid.n) ||
      std::abs(grid.center(static_cast<std::size_t>(ii)) - x1) > 1e-9 * grid.h)
    throw std::invalid_argument("momentum_residual: x1 must be an interior cell center");
  const std::size_t i = static_cast<std::size_t>(ii);

  const double dt2 = times[k + 1] - times[k - 1];
  const double two_h = 2.0 * grid.h;
  const double mass = (a.rho_tilde[k + 1][i] - a.rho_tilde[k - 1][i]) / dt2 +
                      (a.m1_tilde[k][i + 1] - a.m1_tilde[k][i - 1]) / two_h;

  const double gamma = a.profile.law.gamma;
  const auto corr_flux = [&](std::size_t ci) {
    const ProfilePointValue q = a.profile.eval(times[k], grid.center(ci));
    const double pp = (gamma == 2.0) ? q.rho_bar : std::pow(q.rho_bar, gamma - 1.0);
    return (pp - q.u1_bar * q.u1_bar) * a.wave.d1[k][ci] + 2.0 * q.u1_bar * a.wave.d2[k][ci];
  };
  const ProfilePointValue qc = a.profile.eval(times[k], x1);
  const double visc = (2.0 * a.wave.mu + a.wave.lam) * a.wave.eps * qc.u1xx_bar;
  const double mom = a.profile.euler_residual(times[k], x1)[1] +
                     (a.wave.d2[k + 1][i] - a.wave.d2[k - 1][i]) / dt2 +
                     (corr_flux(i + 1) - corr_flux(i - 1)) / two_h - visc;
  return {mass, mom};
}

struct PerturbationSpec {
  double amplitude = 0.0;  // target discrete scaled H2 size of (phi, psi1, psi2)
  std::uint64_t seed = 0;
  int mode_count = 1;  // transverse Fourier modes per component, at most 4
};

namespace detail {

// Smooth bump supported on (-2, 2), equal to 1 at the origin.
inline double support_bump(double x1) {
  const double s = 0.5 * x1;
  const double q = 1.0 - s * s;
  if (!(q > 0.0)) return 0.0;
  return std::exp(1.0 - 1.0 / q);
}

// Uniform draw on [0, 1) with an engine-independent bit layout.
inline double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-53;
}

}  // namespace detail

// Initial data for the two-dimensional flow: the t = 0 profile slice plus a
// reproducible perturbation, compactly supported in x1 and low-mode in x2,
// rescaled so its discrete scaled H2 norm equals the requested amplitude.
// The perturbation acts on (rho, u1, u2); the result is conservative.
inline Field2D initial_data(const AnsatzProfile& a, const PerturbationSpec& pert,
                            const Grid2D& g) {
  if (!(pert.amplitude >= 0.0)) throw config_error("initial_data: amplitude must be >= 0");
  if (pert.mode_count < 1 || pert.mode_count > 4)
    throw config_error("initial_data: mode_count must lie in [1, 4]");

  std::vector<double> rho_bar(g.x.n), u1_bar(g.x.n), m1_bar(g.x.n);
  for (std::size_t i = 0; i < g.x.n; ++i) {
    const ProfilePointValue q = a.profile.eval(0.0, g.x.center(i));
    rho_bar[i] = q.rho_bar;
    u1_bar[i] = q.u1_bar;
    m1_bar[i] = q.m1_bar;
  }

  Field2D f(g);
  if (pert.amplitude == 0.0) {
    for (std::size_t i = 0; i < g.x.n; ++i) {
      for (std::size_t j = 0; j < g.y.n; ++j) {
        const std::size_t c = g.idx(i, j);
        f.rho[c] = rho_bar[i];
        f.m1[c] = m1_bar[i];
        f.m2[c] = 0.0;
      }
    }
    return f;
  }

  if (!(g.x.x_lo < -2.0 && g.x.x_hi() > 2.0))
    throw config_error("initial_data: perturbation support (-2, 2) must lie inside the strip");

  std::mt19937_64 rng(pert.seed);
  const int modes = pert.mode_count;
  std::array<std::vector<double>, 3> cos_coef, sin_coef;
  for (int comp = 0; comp < 3; ++comp) {
    cos_coef[comp].resize(static_cast<std::size_t>(modes));
    sin_coef[comp].resize(static_cast<std::size_t>(modes));
    for (int m = 0; m < modes; ++m) {
      cos_coef[comp][static_cast<std::size_t>(m)] = 2.0 * detail::unit_draw(rng) - 1.0;
      sin_coef[comp][static_cast<std::size_t>(m)] = 2.0 * detail::unit_draw(rng) - 1.0;
    }
  }

  PerturbationField p;
  p.grid = g;
  p.phi.resize(g.cells());
  p.psi1.resize(g.cells());
  p.psi2.resize(g.cells());
  std::array<std::vector<double>*, 3> comps{&p.phi, &p.psi1, &p.psi2};
  std::array<std::vector<double>, 3> transverse;
  for (int comp = 0; comp < 3; ++comp) {
    transverse[comp].assign(g.y.n, 0.0);
    for (std::size_t j = 0; j < g.y.n; ++j) {
      const double y = g.y.center(j);
      double s = 0.0;
      for (int m = 0; m < modes; ++m) {
        const double phase = 2.0 * std::numbers::pi * (m + 1) * y;
        s += cos_coef[comp][static_cast<std::size_t>(m)] * std::cos(phase) +
             sin_coef[comp][static_cast<std::size_t>(m)] * std::sin(phase);
      }
      transverse[comp][j] = s;
    }
  }
  for (std::size_t i = 0; i < g.x.n; ++i) {
    const double b = detail::support_bump(g.x.center(i));
    for (std::size_t j = 0; j < g.y.n; ++j) {
      const std::size_t c = g.idx(i, j);
      for (int comp = 0; comp < 3; ++comp) (*comps[comp])[c] = b * transverse[comp][j];
    }
  }

  const double raw = perturbation_h2_scaled(p, a.wave.eps);
  if (!(raw > 0.0)) throw config_error("initial_data: degenerate perturbation basis");
  const double scale = pert.amplitude / raw;
  for (int comp = 0; comp < 3; ++comp)
    for (double& v : *comps[comp]) v *= scale;

  const double rho_minus = std::min(a.profile.ends.left.rho, a.profile.ends.right.rho);
  for (std::size_t i = 0; i < g.x.n; ++i) {
    for (std::size_t j = 0; j < g.y.n; ++j) {
      const std::size_t c = g.idx(i, j);
      const double rho = rho_bar[i] + p.phi[c];
      if (!(rho > 0.5 * rho_minus))
        throw config_error(
            "initial_data: perturbed density reaches half the far-field minimum; "
            "reduce the amplitude");
      f.rho[c] = rho;
      f.m1[c] = rho * (u1_bar[i] + p.psi1[c]);
      f.m2[c] = rho * p.psi2[c];
    }
  }
  return f;
}

}  // namespace visclim
