#pragma once

// Linear hyperbolic corrector (d1, d2)(t, x1) restoring the viscous momentum
// flux of the smooth rarefaction profile. In diagonal variables
// (D1, D2) = Lbar (d1, d2) the system reads
//   D_it + (lambda_i D_i)_x1 = (sqrt2/2)(2 mu + lam) eps u1_x1x1 + (S D)_i,
// with zero initial data, where S = Lbar_x1 (Abar - lambda2 I) Rbar. The
// second column of S vanishes because (Abar - lambda2 I) rbar_2 = 0, so D1 is
// decoupled and advanced first; D2 then sees only the already-known D1.

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "visclim/detail/parallel.hpp"
#include "visclim/errors.hpp"
#include "visclim/grid.hpp"
#include "visclim/rarefaction.hpp"

namespace visclim {

using Mat2 = std::array<std::array<double, 2>, 2>;

inline Mat2 mat2_mul(const Mat2& a, const Mat2& b) {
  Mat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

struct EigenSystem {
  double lambda1;
  double lambda2;
  Mat2 Lbar;  // rows are the left eigenvectors
  Mat2 Rbar;  // columns are the right eigenvectors
  Mat2 Abar;
};

inline EigenSystem eigen_decompose(const GasLaw& law, double rho_bar, double m1_bar) {
  detail::require_positive_density(rho_bar);
  const double u = m1_bar / rho_bar;
  const double c = sound_speed(law, rho_bar);
  const double s = std::sqrt(2.0) / 2.0;
  const double k = s / c;
  EigenSystem es;
  es.lambda1 = u - c;
  es.lambda2 = u + c;
  es.Abar = {{{0.0, 1.0}, {c * c - u * u, 2.0 * u}}};
  es.Lbar = {{{-s * es.lambda2, s}, {-s * es.lambda1, s}}};
  es.Rbar = {{{-k, k}, {-k * es.lambda1, k * es.lambda2}}};
  return es;
}

/// Source matrix S = Lbar_x1 (Abar - lambda2 I) Rbar at one profile point.
/// Lbar_x1 passes through (rho_x1, m1_x1) by the chain rule.
inline Mat2 coupling_from_point(const GasLaw& law, const ProfilePointValue& q) {
  const EigenSystem es = eigen_decompose(law, q.rho_bar, q.m1_bar);
  const double m1x = q.rhox_bar * q.u1_bar + q.rho_bar * q.u1x_bar;
  const double u1x = (m1x - q.u1_bar * q.rhox_bar) / q.rho_bar;
  const double cx =
      0.5 * (law.gamma - 1.0) * std::pow(q.rho_bar, 0.5 * (law.gamma - 3.0)) * q.rhox_bar;
  const double s = std::sqrt(2.0) / 2.0;
  const Mat2 Lx = {{{-s * (u1x + cx), 0.0}, {-s * (u1x - cx), 0.0}}};
  Mat2 B = es.Abar;
  B[0][0] -= es.lambda2;
  B[1][1] -= es.lambda2;
  return mat2_mul(Lx, mat2_mul(B, es.Rbar));
}

inline Mat2 coupling_matrix(const RarefactionProfile& profile, double t, double x1) {
  return coupling_from_point(profile.law, profile.eval(t, x1));
}

struct HyperbolicWaveField {
  Grid1D grid;
  std::vector<double> times;
  std::vector<std::vector<double>> D1, D2;  // diagonal variables, [time][cell]
  std::vector<std::vector<double>> d1, d2;  // reconstructed corrector, [time][cell]
  double eps = 0.0;
  double mu = 0.0;
  double lam = 0.0;
};

/// Advance the diagonalized system to the requested output times (default
/// {T}) with a conservative sign-split upwind scheme, dt = 0.9 h1 / max-speed,
/// zero-corrector ghost cells, and explicit Euler in time. Both components
/// read only time-level-n data, so D2 couples to the previous D1.
inline HyperbolicWaveField solve(const RarefactionProfile& profile, double eps, double mu,
                                 double lam, double T, const Grid1D& grid,
                                 std::vector<double> out_times = {}, int threads = 1) {
  if (!(eps >= 0.0)) throw config_error("hyperbolic_wave: need eps >= 0");
  if (!(T > 0.0)) throw config_error("hyperbolic_wave: need T > 0");
  if (!(grid.h <= profile.wave.delta / 10.0 * (1.0 + 1e-12))) {
    throw config_error("hyperbolic_wave: grid too coarse for the layer (need h1 <= delta/10)");
  }
  if (out_times.empty()) out_times = {T};
  for (std::size_t i = 0; i < out_times.size(); ++i) {
    const bool increasing = i == 0 ? out_times[0] > 0.0 : out_times[i] > out_times[i - 1];
    if (!increasing || !(out_times[i] <= T * (1.0 + 1e-12))) {
      throw config_error("hyperbolic_wave: output times must increase within (0, T]");
    }
  }

  const std::size_t n = grid.n;
  double vmax = 0.0;
  for (const GasState1D* s : {&profile.ends.left, &profile.ends.right}) {
    for (int i : {1, 2}) vmax = std::max(vmax, std::abs(char_speed(profile.law, *s, i)));
  }
  const double dt_base = 0.9 * grid.h / vmax;

  HyperbolicWaveField field;
  field.grid = grid;
  field.eps = eps;
  field.mu = mu;
  field.lam = lam;

  std::vector<double> D1(n, 0.0), D2(n, 0.0), D1n(n), D2n(n);
  std::vector<double> lam1f(n + 1), lam2f(n + 1);
  std::vector<double> src(n), S00(n), S01(n), S10(n), S11(n);

  const auto record = [&](double t) {
    field.times.push_back(t);
    field.D1.push_back(D1);
    field.D2.push_back(D2);
    std::vector<double> r1(n), r2(n);
    detail::parallel_for(n, threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t j = b; j < e; ++j) {
        const ProfilePointValue q = profile.eval(t, grid.center(j));
        const EigenSystem es = eigen_decompose(profile.law, q.rho_bar, q.m1_bar);
        r1[j] = es.Rbar[0][0] * D1[j] + es.Rbar[0][1] * D2[j];
        r2[j] = es.Rbar[1][0] * D1[j] + es.Rbar[1][1] * D2[j];
      }
    });
    field.d1.push_back(std::move(r1));
    field.d2.push_back(std::move(r2));
  };

  record(0.0);
  const double visc = std::sqrt(2.0) / 2.0 * (2.0 * mu + lam) * eps;
  const double hinv = 1.0 / grid.h;
  double t = 0.0;
  for (double target : out_times) {
    while (t < target) {
      detail::parallel_for(n + 1, threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
          const ProfilePointValue q = profile.eval(t, grid.face(i));
          const double c = sound_speed(profile.law, q.rho_bar);
          lam1f[i] = q.u1_bar - c;
          lam2f[i] = q.u1_bar + c;
        }
      });
      detail::parallel_for(n, threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t j = b; j < e; ++j) {
          const ProfilePointValue q = profile.eval(t, grid.center(j));
          src[j] = visc * q.u1xx_bar;
          const Mat2 S = coupling_from_point(profile.law, q);
          S00[j] = S[0][0];
          S01[j] = S[0][1];
          S10[j] = S[1][0];
          S11[j] = S[1][1];
        }
      });
      double dt, t_next;
      if (target - t <= dt_base) {
        dt = target - t;
        t_next = target;
      } else {
        dt = dt_base;
        t_next = t + dt_base;
      }
      detail::parallel_for(n, threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t j = b; j < e; ++j) {
          const double l1 = j > 0 ? D1[j - 1] : 0.0;
          const double r1 = j + 1 < n ? D1[j + 1] : 0.0;
          const double l2 = j > 0 ? D2[j - 1] : 0.0;
          const double r2 = j + 1 < n ? D2[j + 1] : 0.0;
          const double f1l = std::max(lam1f[j], 0.0) * l1 + std::min(lam1f[j], 0.0) * D1[j];
          const double f1r =
              std::max(lam1f[j + 1], 0.0) * D1[j] + std::min(lam1f[j + 1], 0.0) * r1;
          const double f2l = std::max(lam2f[j], 0.0) * l2 + std::min(lam2f[j], 0.0) * D2[j];
          const double f2r =
              std::max(lam2f[j + 1], 0.0) * D2[j] + std::min(lam2f[j + 1], 0.0) * r2;
          D1n[j] = D1[j] - dt * hinv * (f1r - f1l) +
                   dt * (src[j] + S00[j] * D1[j] + S01[j] * D2[j]);
          D2n[j] = D2[j] - dt * hinv * (f2r - f2l) +
                   dt * (src[j] + S10[j] * D1[j] + S11[j] * D2[j]);
        }
      });
      D1.swap(D1n);
      D2.swap(D2n);
      t = t_next;
    }
    record(t);
  }
  return field;
}

}  // namespace visclim
