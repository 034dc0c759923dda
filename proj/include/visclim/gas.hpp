#pragma once

// Isentropic gamma-law gas: p(rho) = rho^gamma / gamma, c(rho) = rho^((gamma-1)/2).
// Riemann invariants, characteristic speeds, the 2-rarefaction admissibility
// check, and the exact self-similar rarefaction fan.

#include <cmath>
#include <stdexcept>

#include "visclim/errors.hpp"

namespace visclim {

struct GasLaw {
  double gamma;

  explicit GasLaw(double gamma_) : gamma(gamma_) {
    if (!(gamma_ > 1.0)) throw config_error("GasLaw: gamma must exceed 1");
  }
};

struct GasState1D {
  double rho;
  double u1;
};

struct RiemannEndStates {
  GasState1D left;
  GasState1D right;
};

namespace detail {
inline void require_positive_density(double rho) {
  if (!(rho > 0.0)) throw std::domain_error("gas law evaluated at non-positive density");
}
}  // namespace detail

inline double pressure(const GasLaw& law, double rho) {
  detail::require_positive_density(rho);
  return std::pow(rho, law.gamma) / law.gamma;
}

/// c(rho) = sqrt(p'(rho)) = rho^((gamma-1)/2).
inline double sound_speed(const GasLaw& law, double rho) {
  detail::require_positive_density(rho);
  return std::pow(rho, 0.5 * (law.gamma - 1.0));
}

/// Antiderivative of sqrt(p'(s))/s with the fixed normalization
/// F(rho) = (2/(gamma-1)) rho^((gamma-1)/2), so F(rho) -> 0 as rho -> 0.
inline double fan_antiderivative(const GasLaw& law, double rho) {
  return 2.0 / (law.gamma - 1.0) * sound_speed(law, rho);
}

/// z_i = u1 + (-1)^(i+1) F(rho), i in {1, 2}.
inline double riemann_invariant(const GasLaw& law, const GasState1D& s, int i) {
  if (i != 1 && i != 2) throw std::domain_error("riemann_invariant: family must be 1 or 2");
  const double f = fan_antiderivative(law, s.rho);
  return s.u1 + (i == 1 ? f : -f);
}

/// lambda_1 = u1 - c, lambda_2 = u1 + c.
inline double char_speed(const GasLaw& law, const GasState1D& s, int i) {
  if (i != 1 && i != 2) throw std::domain_error("char_speed: family must be 1 or 2");
  const double c = sound_speed(law, s.rho);
  return s.u1 + (i == 1 ? -c : c);
}

/// Velocity on the 2-rarefaction curve through `left` at density rho_right:
/// u1+ = u1- + F(rho_right) - F(rho_left).
inline double u1_right_for_2rarefaction(const GasLaw& law, const GasState1D& left,
                                        double rho_right) {
  return left.u1 + fan_antiderivative(law, rho_right) - fan_antiderivative(law, left.rho);
}

/// True iff the pair is connected by a 2-rarefaction: matching z2 and
/// lambda_2(right) > lambda_2(left). A zero-strength pair is admissible.
inline bool check_2rarefaction(const GasLaw& law, const RiemannEndStates& ends) {
  const double z2l = riemann_invariant(law, ends.left, 2);
  const double z2r = riemann_invariant(law, ends.right, 2);
  if (std::abs(z2l - z2r) > 1e-10 * std::max(1.0, std::abs(z2l))) return false;
  if (ends.left.rho == ends.right.rho && ends.left.u1 == ends.right.u1) return true;
  return char_speed(law, ends.right, 2) > char_speed(law, ends.left, 2);
}

/// Exact self-similar fan at speed xi = x1/t. Constant end states outside
/// [lambda_2(left), lambda_2(right)]; inside, the state with lambda_2 = xi on
/// the z2 = const curve:
///   c = ((gamma-1)/(gamma+1)) (xi - z2), rho = c^(2/(gamma-1)), u1 = xi - c.
inline GasState1D exact_fan_eval(const GasLaw& law, const RiemannEndStates& ends, double xi) {
  const double lo = char_speed(law, ends.left, 2);
  const double hi = char_speed(law, ends.right, 2);
  if (xi <= lo) return ends.left;
  if (xi >= hi) return ends.right;
  const double z2 = riemann_invariant(law, ends.left, 2);
  const double c = (law.gamma - 1.0) / (law.gamma + 1.0) * (xi - z2);
  const double rho = std::pow(c, 2.0 / (law.gamma - 1.0));
  return {rho, xi - c};
}

}  // namespace visclim
