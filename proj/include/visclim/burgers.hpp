#pragma once

// Smooth expanding solution of the inviscid Burgers equation
//   w_t + w w_x = 0,  w(0, x) = (w+ + w-)/2 + (w+ - w-)/2 tanh(x / delta),
// evaluated by the method of characteristics. For w- <= w+ the characteristic
// map x0 -> x0 + w0(x0) t is strictly increasing, so the solution stays smooth
// for all t >= 0 and inherits monotonicity in x from the data.

#include <algorithm>
#include <cmath>

#include "visclim/errors.hpp"

namespace visclim {

struct BurgersWave {
  double w_minus;
  double w_plus;
  double delta;

  BurgersWave(double w_minus_, double w_plus_, double delta_)
      : w_minus(w_minus_), w_plus(w_plus_), delta(delta_) {
    if (!(w_plus_ >= w_minus_)) throw config_error("BurgersWave: need w_plus >= w_minus");
    if (!(delta_ > 0.0)) throw config_error("BurgersWave: need delta > 0");
  }

  double mid() const { return 0.5 * (w_plus + w_minus); }
  double half_jump() const { return 0.5 * (w_plus - w_minus); }
  double jump() const { return w_plus - w_minus; }
};

struct BurgersPointValue {
  double w;
  double wx;
  double wxx;
  double wxxx;
};

/// Data profile w0 and its first three derivatives.
inline BurgersPointValue initial_profile(const BurgersWave& wave, double x) {
  const double d = wave.delta;
  const double s = x / d;
  // tanh and sech^2 from one exponential; exact saturation in the far field.
  const double e = std::exp(-2.0 * std::abs(s));
  const double th = std::copysign((1.0 - e) / (1.0 + e), s);
  const double sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
  const double half = wave.half_jump();
  BurgersPointValue p;
  p.w = wave.mid() + half * th;
  p.wx = half / d * sech2;
  p.wxx = -2.0 * half / (d * d) * sech2 * th;
  p.wxxx = 2.0 * half / (d * d * d) * sech2 * (2.0 * th * th - sech2);
  return p;
}

/// Foot x0 of the characteristic through (t, x1): x0 + w0(x0) t = x1.
/// Bisection/Newton hybrid inside the bracket [x1 - w+ t, x1 - w- t]; a Newton
/// step is taken only when it stays inside the bracket and at least halves the
/// previous step, otherwise the bracket is bisected, so progress is guaranteed.
inline double characteristic_foot(const BurgersWave& wave, double t, double x1) {
  if (!(t >= 0.0)) throw std::domain_error("characteristic_foot: need t >= 0");
  if (t == 0.0 || wave.jump() == 0.0) return x1 - wave.w_minus * t;
  double lo = x1 - wave.w_plus * t;  // g(lo) <= 0 <= g(hi), g strictly increasing
  double hi = x1 - wave.w_minus * t;
  double x0 = 0.5 * (lo + hi);
  double dx_old = hi - lo;
  const double tol = 1e-13 * std::max({1.0, std::abs(x1), std::abs(lo), std::abs(hi)});
  for (int it = 0; it < 200; ++it) {
    const BurgersPointValue p = initial_profile(wave, x0);
    const double g = x0 + p.w * t - x1;
    if (std::abs(g) <= tol) return x0;
    (g > 0.0 ? hi : lo) = x0;
    const double J = 1.0 + t * p.wx;  // g' >= 1
    double next;
    double dx;
    if (std::abs(2.0 * g) < std::abs(dx_old * J)) {
      dx = g / J;
      next = x0 - dx;
      if (!(next > lo && next < hi)) {
        dx = 0.5 * (hi - lo);
        next = 0.5 * (lo + hi);
      }
    } else {
      dx = 0.5 * (hi - lo);
      next = 0.5 * (lo + hi);
    }
    if (next == x0 || dx == 0.0) return x0;
    dx_old = dx;
    x0 = next;
  }
  return x0;
}

/// Solution value and spatial derivatives at (t, x1). With J = 1 + t w0'(x0):
///   w = w0,  wx = w0'/J,  wxx = w0''/J^3,  wxxx = (w0''' J - 3 t w0''^2)/J^5.
inline BurgersPointValue eval(const BurgersWave& wave, double t, double x1) {
  if (!(t >= 0.0)) throw std::domain_error("eval: need t >= 0");
  const double reach = 50.0 * wave.delta;
  const double wmax = std::max(std::abs(wave.w_minus), std::abs(wave.w_plus));
  if (std::abs(x1) > reach + t * wmax) {
    // Feet beyond 50 delta carry data indistinguishable from the end states.
    return {x1 < 0.0 ? wave.w_minus : wave.w_plus, 0.0, 0.0, 0.0};
  }
  const double x0 = characteristic_foot(wave, t, x1);
  const BurgersPointValue p0 = initial_profile(wave, x0);
  const double J = 1.0 + t * p0.wx;
  const double J2 = J * J;
  BurgersPointValue p;
  p.w = p0.w;
  p.wx = p0.wx / J;
  p.wxx = p0.wxx / (J2 * J);
  p.wxxx = (p0.wxxx * J - 3.0 * t * p0.wxx * p0.wxx) / (J2 * J2 * J);
  return p;
}

}  // namespace visclim
