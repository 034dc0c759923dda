#pragma once

// Smooth approximate 2-rarefaction wave (rho, u1)(t, x1). The second
// characteristic speed is prescribed as a smooth expanding Burgers wave,
// lambda2(rho, u1)(t, x1) = w(time_shift + t, x1), and the state is recovered
// from it together with the constant Riemann invariant z2. All x1-derivatives
// up to third order follow by the chain rule, so the pair solves the 1D
// isentropic Euler equations exactly.

#include <array>
#include <cmath>

#include "visclim/burgers.hpp"
#include "visclim/gas.hpp"

namespace visclim {

struct ProfilePointValue {
  double rho_bar;
  double rhox_bar;
  double rhoxx_bar;
  double rhoxxx_bar;
  double u1_bar;
  double u1x_bar;
  double u1xx_bar;
  double u1xxx_bar;
  double m1_bar;
};

struct RarefactionProfile {
  GasLaw law;
  RiemannEndStates ends;
  BurgersWave wave;  // end speeds are lambda2 of the end states
  double z2_const;
  double time_shift;  // evaluation reads the Burgers wave at time_shift + t

  RarefactionProfile(const GasLaw& law_, const RiemannEndStates& ends_, double delta,
                     double time_shift_ = 0.0)
      : law(law_),
        ends(ends_),
        wave(char_speed(law_, ends_.left, 2), char_speed(law_, ends_.right, 2), delta),
        z2_const(riemann_invariant(law_, ends_.left, 2)),
        time_shift(time_shift_) {
    if (!check_2rarefaction(law_, ends_)) {
      throw config_error("RarefactionProfile: end states are not a 2-rarefaction pair");
    }
    if (!(time_shift_ >= 0.0)) {
      throw config_error("RarefactionProfile: need time_shift >= 0");
    }
  }

  /// State with lambda2 = w on the curve z2 = z2_const.
  GasState1D state_from_w(double w) const {
    if (!(w >= wave.w_minus && w <= wave.w_plus)) {
      throw std::domain_error("state_from_w: w outside [w_minus, w_plus]");
    }
    const double g = law.gamma;
    const double c = (g - 1.0) / (g + 1.0) * (w - z2_const);
    const double rho = g == 2.0 ? c * c : std::pow(c, 2.0 / (g - 1.0));
    return GasState1D{rho, w - c};
  }

  ProfilePointValue eval(double t, double x1) const {
    if (!(t >= 0.0)) throw std::domain_error("RarefactionProfile::eval: need t >= 0");
    const BurgersPointValue b = visclim::eval(wave, time_shift + t, x1);
    const double g = law.gamma;
    ProfilePointValue q;
    q.u1_bar = (2.0 * b.w + (g - 1.0) * z2_const) / (g + 1.0);
    const double a = 2.0 / (g + 1.0);
    q.u1x_bar = a * b.wx;
    q.u1xx_bar = a * b.wxx;
    q.u1xxx_bar = a * b.wxxx;
    const double c = (g - 1.0) / (g + 1.0) * (b.w - z2_const);
    q.rho_bar = g == 2.0 ? c * c : std::pow(c, 2.0 / (g - 1.0));
    // rho_x = rho^{(3-g)/2} u1_x along z2 = const; differentiate twice more.
    const double ra = std::pow(q.rho_bar, 0.5 * (3.0 - g));
    const double rb = std::pow(q.rho_bar, 2.0 - g);
    const double rc = std::pow(q.rho_bar, 0.5 * (5.0 - 3.0 * g));
    const double u1x2 = q.u1x_bar * q.u1x_bar;
    q.rhox_bar = ra * q.u1x_bar;
    q.rhoxx_bar = ra * q.u1xx_bar + 0.5 * (3.0 - g) * rb * u1x2;
    q.rhoxxx_bar = ra * q.u1xxx_bar + 1.5 * (3.0 - g) * rb * q.u1x_bar * q.u1xx_bar +
                   0.5 * (3.0 - g) * (2.0 - g) * rc * u1x2 * q.u1x_bar;
    q.m1_bar = q.rho_bar * q.u1_bar;
    return q;
  }

  /// Residuals of the 1D isentropic Euler system, (mass, momentum). Time
  /// derivatives use the characteristic flow, w_t = -w w_x; both components
  /// cancel to roundoff.
  std::array<double, 2> euler_residual(double t, double x1) const {
    const BurgersPointValue b = visclim::eval(wave, time_shift + t, x1);
    const ProfilePointValue q = eval(t, x1);
    const double rho_t = -b.w * q.rhox_bar;
    const double u1_t = -b.w * q.u1x_bar;
    const double mass = rho_t + q.rhox_bar * q.u1_bar + q.rho_bar * q.u1x_bar;
    const double m1_t = rho_t * q.u1_bar + q.rho_bar * u1_t;
    const double csq =
        law.gamma == 2.0 ? q.rho_bar : std::pow(q.rho_bar, law.gamma - 1.0);
    const double mom = m1_t + q.rhox_bar * q.u1_bar * q.u1_bar +
                       2.0 * q.m1_bar * q.u1x_bar + csq * q.rhox_bar;
    return {mass, mom};
  }
};

}  // namespace visclim
