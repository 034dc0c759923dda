#include "visclim/diagnostics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "visclim/rarefaction.hpp"

namespace {

using namespace visclim;

double rand_unit(std::mt19937_64& rng) { return (rng() >> 11) * 0x1p-53; }

std::vector<double> fill(const Grid2D& g, double (*fn)(double, double)) {
  std::vector<double> f(g.cells());
  for (std::size_t i = 0; i < g.x.n; ++i)
    for (std::size_t j = 0; j < g.y.n; ++j) f[g.idx(i, j)] = fn(g.x.center(i), g.y.center(j));
  return f;
}

TEST(Norms, ConstantClosedForms) {
  const Grid2D g(10.0, 200, 16);
  const std::vector<double> f(g.cells(), 0.7);
  EXPECT_NEAR(field_norm(f, g, NormKind::L1), 0.7 * 20.0, 1e-12 * 14.0);
  EXPECT_NEAR(field_norm(f, g, NormKind::L2), 0.7 * std::sqrt(20.0), 1e-12 * 3.2);
  EXPECT_DOUBLE_EQ(field_norm(f, g, NormKind::Linf), 0.7);
  // Derivatives of a constant vanish exactly, so H1 and H2 collapse to L2.
  EXPECT_DOUBLE_EQ(field_norm(f, g, NormKind::H1), field_norm(f, g, NormKind::L2));
  EXPECT_DOUBLE_EQ(field_norm(f, g, NormKind::H2), field_norm(f, g, NormKind::L2));
  EXPECT_NEAR(field_norm_scaled(f, g, NormKind::L2, 0.1), 10.0 * 0.7 * std::sqrt(20.0),
              1e-11 * 32.0);
}

TEST(Norms, TransverseSineClosedForm) {
  const Grid2D g(10.0, 64, 16);
  const std::vector<double> f =
      fill(g, [](double, double y) { return std::sin(2.0 * std::numbers::pi * y); });
  // Midpoint quadrature of sin^2 over whole periods is exact.
  EXPECT_NEAR(field_norm(f, g, NormKind::L2), std::sqrt(10.0), 1e-12 * std::sqrt(10.0));
}

TEST(Norms, ScaledFrameConversionIdentities) {
  const Grid2D g(5.0, 80, 32);
  std::mt19937_64 rng(11);
  std::vector<double> f(g.cells());
  for (double& v : f) v = -1.0 + 2.0 * rand_unit(rng);
  for (double eps : {0.5, 0.04}) {
    const double l2 = field_norm(f, g, NormKind::L2);
    EXPECT_NEAR(field_norm_scaled(f, g, NormKind::L2, eps), l2 / eps, 1e-12 * l2 / eps);
    // H2(scaled)^2 = eps^-2 L2^2 + first-order part + eps^2 second-order part.
    const double h1 = field_norm(f, g, NormKind::H1);
    const double h2 = field_norm(f, g, NormKind::H2);
    const double grad_sq = h1 * h1 - l2 * l2;
    const double hess_sq = h2 * h2 - h1 * h1;
    const double want = std::sqrt(l2 * l2 / (eps * eps) + grad_sq + eps * eps * hess_sq);
    const double got = field_norm_scaled(f, g, NormKind::H2, eps);
    EXPECT_NEAR(got, want, 1e-12 * want);
  }
}

TEST(Norms, SmoothFieldMatchesAnalyticIntegrals) {
  // f = exp(-x1^2/2) sin(2 pi x2); all integrals are Gaussian closed forms.
  const Grid2D g(10.0, 400, 128);
  const std::vector<double> f = fill(
      g, [](double x, double y) { return std::exp(-0.5 * x * x) * std::sin(2.0 * std::numbers::pi * y); });
  const double rp = std::sqrt(std::numbers::pi);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double l2_sq = rp / 2.0;
  const double grad_sq = rp / 4.0 + 2.0 * pi2 * rp;
  const double hess_sq = 3.0 * rp / 8.0 + pi2 * rp + 8.0 * pi2 * pi2 * rp;
  EXPECT_NEAR(field_norm(f, g, NormKind::L2), std::sqrt(l2_sq), 0.01 * std::sqrt(l2_sq));
  const double h1 = std::sqrt(l2_sq + grad_sq);
  EXPECT_NEAR(field_norm(f, g, NormKind::H1), h1, 0.01 * h1);
  const double h2 = std::sqrt(l2_sq + grad_sq + hess_sq);
  EXPECT_NEAR(field_norm(f, g, NormKind::H2), h2, 0.01 * h2);
}

TEST(PotentialEnergy, ClosedFormsAndConvexity) {
  const GasLaw law(2.0);
  EXPECT_DOUBLE_EQ(potential_energy(law, 1.0, 1.0), 0.0);
  EXPECT_NEAR(potential_energy(law, 2.0, 1.0), 0.25, 1e-14);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 500; ++k) {
    const double rho = 0.2 + 5.0 * rand_unit(rng);
    const double rt = 0.2 + 5.0 * rand_unit(rng);
    const double val = potential_energy(law, rho, rt);
    EXPECT_GE(val, -1e-15);
    // gamma = 2 closed form (rho - rho_tilde)^2 / (2 rho).
    EXPECT_NEAR(val, (rho - rt) * (rho - rt) / (2.0 * rho), 1e-13 * std::max(1.0, val));
  }
  const GasLaw g14(1.4);
  for (int k = 0; k < 200; ++k) {
    const double rho = 0.2 + 5.0 * rand_unit(rng);
    const double rt = 0.2 + 5.0 * rand_unit(rng);
    EXPECT_GE(potential_energy(g14, rho, rt), -1e-15);
  }
}

TEST(ExtractPerturbation, ZeroOffsetAndRoundTrip) {
  const GasLaw law(2.0);
  const RarefactionProfile prof(law, RiemannEndStates{{1.0, 0.0}, {4.0, 2.0}}, 0.5);
  const Grid2D g(8.0, 64, 8);
  std::vector<double> rho_tilde(g.x.n), u1_tilde(g.x.n);
  for (std::size_t i = 0; i < g.x.n; ++i) {
    const ProfilePointValue q = prof.eval(0.3, g.x.center(i));
    rho_tilde[i] = q.rho_bar;
    u1_tilde[i] = q.u1_bar;
  }
  Field2D field(g);
  for (std::size_t i = 0; i < g.x.n; ++i) {
    for (std::size_t j = 0; j < g.y.n; ++j) {
      field.rho[g.idx(i, j)] = rho_tilde[i];
      field.m1[g.idx(i, j)] = rho_tilde[i] * u1_tilde[i];
    }
  }
  const PerturbationField zero = extract_perturbation(field, rho_tilde, u1_tilde);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    ASSERT_DOUBLE_EQ(zero.phi[c], 0.0);
    ASSERT_LE(std::abs(zero.psi1[c]), 1e-15);
    ASSERT_DOUBLE_EQ(zero.psi2[c], 0.0);
  }
  Field2D offset = field;
  for (double& v : offset.rho) v += 0.3;
  const PerturbationField p = extract_perturbation(offset, rho_tilde, u1_tilde);
  for (std::size_t i = 0; i < g.x.n; ++i) {
    for (std::size_t j = 0; j < g.y.n; ++j) {
      const std::size_t c = g.idx(i, j);
      ASSERT_NEAR(p.phi[c], 0.3, 1e-13);
      // Momentum is unchanged, so the velocity shifts by -0.3 u / (rho + 0.3).
      ASSERT_NEAR(p.psi1[c], -0.3 * u1_tilde[i] / (rho_tilde[i] + 0.3), 1e-13);
    }
  }
  // Generic round trip: ansatz + extracted perturbation reproduces the field.
  std::mt19937_64 rng(77);
  Field2D noisy = field;
  for (std::size_t c = 0; c < g.cells(); ++c) {
    noisy.rho[c] += 0.1 * (rand_unit(rng) - 0.5);
    noisy.m1[c] += 0.1 * (rand_unit(rng) - 0.5);
    noisy.m2[c] += 0.1 * (rand_unit(rng) - 0.5);
  }
  const PerturbationField q = extract_perturbation(noisy, rho_tilde, u1_tilde);
  for (std::size_t i = 0; i < g.x.n; ++i) {
    for (std::size_t j = 0; j < g.y.n; ++j) {
      const std::size_t c = g.idx(i, j);
      EXPECT_NEAR(rho_tilde[i] + q.phi[c], noisy.rho[c], 1e-13);
      EXPECT_NEAR(u1_tilde[i] + q.psi1[c], noisy.m1[c] / noisy.rho[c], 1e-13);
      EXPECT_NEAR(q.psi2[c], noisy.m2[c] / noisy.rho[c], 1e-13);
    }
  }
  std::vector<double> bad(g.x.n + 1, 1.0);
  EXPECT_THROW(extract_perturbation(field, bad, u1_tilde), std::invalid_argument);
}

TEST(SupErrorVsFan, FanSamplesAndOffset) {
  const GasLaw law(2.0);
  const RiemannEndStates ends{{1.0, 0.0}, {4.0, 2.0}};
  const Grid2D g(8.0, 128, 4);
  std::vector<double> times{0.5, 1.0};
  std::vector<Field2D> snaps;
  for (double t : times) {
    Field2D f(g);
    for (std::size_t i = 0; i < g.x.n; ++i) {
      const GasState1D s = exact_fan_eval(law, ends, g.x.center(i) / t);
      for (std::size_t j = 0; j < g.y.n; ++j) {
        f.rho[g.idx(i, j)] = s.rho;
        f.m1[g.idx(i, j)] = s.rho * s.u1;
      }
    }
    snaps.push_back(std::move(f));
  }
  EXPECT_LE(sup_error_vs_fan(times, snaps, law, ends, 0.25, 1.0), 1e-13);
  for (double& v : snaps[1].rho) v += 0.3;
  EXPECT_NEAR(sup_error_vs_fan(times, snaps, law, ends, 0.25, 1.0), 0.3, 1e-12);
  // Window [h, T] must contain a snapshot.
  EXPECT_THROW(sup_error_vs_fan(times, snaps, law, ends, 1.5, 2.0), std::invalid_argument);
}

}  // namespace
