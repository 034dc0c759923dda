#include "visclim/hyperbolic_wave.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace {

using namespace visclim;

double rand_unit(std::mt19937_64& rng) { return (rng() >> 11) * 0x1p-53; }

Mat2 mul(const Mat2& a, const Mat2& b) {
  Mat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

double abs_sum(const Mat2& a) {
  return std::abs(a[0][0]) + std::abs(a[0][1]) + std::abs(a[1][0]) + std::abs(a[1][1]);
}

RarefactionProfile standard_profile(double delta) {
  const GasLaw law(2.0);
  return RarefactionProfile(law, RiemannEndStates{{1.0, 0.0}, {4.0, 2.0}}, delta);
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

double spread(const std::vector<double>& v) {
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

TEST(EigenDecompose, ExplicitExampleAndEigenvectorResidual) {
  const GasLaw law(2.0);
  const EigenSystem es = eigen_decompose(law, 1.0, 0.0);
  EXPECT_DOUBLE_EQ(es.Abar[0][0], 0.0);
  EXPECT_DOUBLE_EQ(es.Abar[0][1], 1.0);
  EXPECT_DOUBLE_EQ(es.Abar[1][0], 1.0);
  EXPECT_DOUBLE_EQ(es.Abar[1][1], 0.0);
  EXPECT_DOUBLE_EQ(es.lambda1, -1.0);
  EXPECT_DOUBLE_EQ(es.lambda2, 1.0);
  // A r_i = lambda_i r_i for random states: the columns really are eigenvectors.
  std::mt19937_64 rng(42);
  for (int k = 0; k < 1000; ++k) {
    const double rho = 0.3 + 4.7 * rand_unit(rng);
    const double u = -3.0 + 6.0 * rand_unit(rng);
    const EigenSystem e = eigen_decompose(law, rho, rho * u);
    const double scale = 1.0 + e.lambda1 * e.lambda1 + e.lambda2 * e.lambda2;
    for (int i = 0; i < 2; ++i) {
      const double li = i == 0 ? e.lambda1 : e.lambda2;
      const double r0 = e.Rbar[0][i], r1 = e.Rbar[1][i];
      const double a0 = e.Abar[0][0] * r0 + e.Abar[0][1] * r1;
      const double a1 = e.Abar[1][0] * r0 + e.Abar[1][1] * r1;
      EXPECT_LE(std::abs(a0 - li * r0), 1e-12 * scale);
      EXPECT_LE(std::abs(a1 - li * r1), 1e-12 * scale);
    }
  }
}

TEST(EigenDecompose, PairingNormalizationAndDiagonalization) {
  const GasLaw law(1.4);
  std::mt19937_64 rng(7);
  const double s = std::sqrt(2.0) / 2.0;
  for (int k = 0; k < 1000; ++k) {
    const double rho = 0.3 + 4.7 * rand_unit(rng);
    const double u = -3.0 + 6.0 * rand_unit(rng);
    const EigenSystem e = eigen_decompose(law, rho, rho * u);
    const Mat2 lr = mul(e.Lbar, e.Rbar);
    EXPECT_LE(std::abs(lr[0][0] - 1.0), 1e-13);
    EXPECT_LE(std::abs(lr[1][1] - 1.0), 1e-13);
    EXPECT_LE(std::abs(lr[0][1]), 1e-13);
    EXPECT_LE(std::abs(lr[1][0]), 1e-13);
    const Mat2 lar = mul(e.Lbar, mul(e.Abar, e.Rbar));
    EXPECT_LE(std::abs(lar[0][0] - e.lambda1), 1e-12);
    EXPECT_LE(std::abs(lar[1][1] - e.lambda2), 1e-12);
    EXPECT_LE(std::abs(lar[0][1]), 1e-12);
    EXPECT_LE(std::abs(lar[1][0]), 1e-12);
    // Second components of the left eigenvectors pin the normalization.
    EXPECT_DOUBLE_EQ(e.Lbar[0][1], s);
    EXPECT_DOUBLE_EQ(e.Lbar[1][1], s);
    const double c = sound_speed(law, rho);
    EXPECT_DOUBLE_EQ(e.Rbar[0][0], -s / c);
    EXPECT_DOUBLE_EQ(e.Rbar[0][1], s / c);
  }
}

TEST(EigenDecompose, RejectsNonPositiveDensity) {
  const GasLaw law(2.0);
  EXPECT_THROW(eigen_decompose(law, 0.0, 0.0), std::domain_error);
  EXPECT_THROW(eigen_decompose(law, -1.0, 0.5), std::domain_error);
}

TEST(CouplingMatrix, ConstantProfileIsZero) {
  const GasLaw law(2.0);
  const RarefactionProfile prof(law, RiemannEndStates{{2.0, 0.5}, {2.0, 0.5}}, 0.3);
  const Mat2 S = coupling_matrix(prof, 0.7, 0.2);
  EXPECT_DOUBLE_EQ(abs_sum(S), 0.0);
}

TEST(CouplingMatrix, SecondColumnVanishes) {
  const RarefactionProfile prof = standard_profile(0.3);
  std::mt19937_64 rng(123);
  for (int k = 0; k < 300; ++k) {
    const double t = 3.0 * rand_unit(rng);
    const double x = -10.0 + 30.0 * rand_unit(rng);
    const Mat2 S = coupling_matrix(prof, t, x);
    EXPECT_LE(std::abs(S[0][1]) + std::abs(S[1][1]), 1e-11 * (abs_sum(S) + 1e-300));
  }
}

TEST(CouplingMatrix, MatchesFiniteDifferenceConstruction) {
  const RarefactionProfile prof = standard_profile(0.3);
  std::mt19937_64 rng(321);
  const double h = 1e-4;
  for (int k = 0; k < 200; ++k) {
    const double t = 2.0 * rand_unit(rng);
    const double x = prof.wave.w_minus * t - 1.5 + (prof.wave.jump() * t + 3.0) * rand_unit(rng);
    const ProfilePointValue q = prof.eval(t, x);
    const EigenSystem e = eigen_decompose(prof.law, q.rho_bar, q.m1_bar);
    const ProfilePointValue ql = prof.eval(t, x - h);
    const ProfilePointValue qr = prof.eval(t, x + h);
    const EigenSystem el = eigen_decompose(prof.law, ql.rho_bar, ql.m1_bar);
    const EigenSystem er = eigen_decompose(prof.law, qr.rho_bar, qr.m1_bar);
    Mat2 Lx{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) Lx[i][j] = (er.Lbar[i][j] - el.Lbar[i][j]) / (2 * h);
    Mat2 B = e.Abar;
    B[0][0] -= e.lambda2;
    B[1][1] -= e.lambda2;
    const Mat2 want = mul(Lx, mul(B, e.Rbar));
    const Mat2 got = coupling_matrix(prof, t, x);
    const double scale = abs_sum(got) + 1e-12;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) EXPECT_LE(std::abs(got[i][j] - want[i][j]), 1e-6 * scale);
  }
}

TEST(Solve, ValidatesInput) {
  const RarefactionProfile prof = standard_profile(0.3);
  const Grid1D fine(-4.0, 4.0, 512);
  const Grid1D coarse(-4.0, 4.0, 64);  // h = 0.125 > delta/10
  EXPECT_THROW(solve(prof, 0.02, 1.0, 0.0, 1.0, coarse), config_error);
  EXPECT_THROW(solve(prof, -0.02, 1.0, 0.0, 1.0, fine), config_error);
  EXPECT_THROW(solve(prof, 0.02, 1.0, 0.0, -1.0, fine), config_error);
  EXPECT_THROW(solve(prof, 0.02, 1.0, 0.0, 1.0, fine, {0.5, 0.4}), config_error);
  EXPECT_THROW(solve(prof, 0.02, 1.0, 0.0, 1.0, fine, {0.5, 2.0}), config_error);
}

TEST(Solve, ZeroSourceGivesExactlyZeroField) {
  const GasLaw law(2.0);
  const RarefactionProfile flat(law, RiemannEndStates{{2.0, 0.5}, {2.0, 0.5}}, 0.3);
  const Grid1D grid(-2.0, 2.0, 256);
  const HyperbolicWaveField a = solve(flat, 0.02, 1.0, 0.0, 0.5, grid);
  const RarefactionProfile prof = standard_profile(0.3);
  const HyperbolicWaveField b = solve(prof, 0.02, 0.0, 0.0, 0.5, grid);
  for (const HyperbolicWaveField* f : {&a, &b}) {
    for (size_t k = 0; k < f->times.size(); ++k) {
      for (std::size_t j = 0; j < f->grid.n; ++j) {
        ASSERT_DOUBLE_EQ(f->D1[k][j], 0.0);
        ASSERT_DOUBLE_EQ(f->D2[k][j], 0.0);
        ASSERT_DOUBLE_EQ(f->d1[k][j], 0.0);
        ASSERT_DOUBLE_EQ(f->d2[k][j], 0.0);
      }
    }
  }
}

TEST(Solve, ReconstructionRoundTripAndOutputTimes) {
  const RarefactionProfile prof = standard_profile(0.4);
  const Grid1D grid(-8.0, 8.0, 512);
  const HyperbolicWaveField f =
      solve(prof, 0.02, 1.0, 0.0, 1.0, grid, {0.3, 0.7, 1.0});
  ASSERT_EQ(f.times.size(), 4u);
  EXPECT_DOUBLE_EQ(f.times[0], 0.0);
  EXPECT_DOUBLE_EQ(f.times[1], 0.3);
  EXPECT_DOUBLE_EQ(f.times[2], 0.7);
  EXPECT_DOUBLE_EQ(f.times[3], 1.0);
  for (std::size_t j = 0; j < grid.n; ++j) {
    ASSERT_DOUBLE_EQ(f.d1[0][j], 0.0);
    ASSERT_DOUBLE_EQ(f.d2[0][j], 0.0);
  }
  double peak = 0.0;
  for (size_t k = 1; k < f.times.size(); ++k) {
    for (std::size_t j = 0; j < grid.n; ++j) {
      peak = std::max(peak, std::abs(f.d1[k][j]));
      const ProfilePointValue q = prof.eval(f.times[k], grid.center(j));
      const EigenSystem e = eigen_decompose(prof.law, q.rho_bar, q.m1_bar);
      const double got1 = e.Lbar[0][0] * f.d1[k][j] + e.Lbar[0][1] * f.d2[k][j];
      const double got2 = e.Lbar[1][0] * f.d1[k][j] + e.Lbar[1][1] * f.d2[k][j];
      const double scale = std::max(1.0, std::abs(f.D1[k][j]) + std::abs(f.D2[k][j]));
      ASSERT_LE(std::abs(got1 - f.D1[k][j]), 1e-11 * scale);
      ASSERT_LE(std::abs(got2 - f.D2[k][j]), 1e-11 * scale);
    }
  }
  EXPECT_GT(peak, 0.0);
}

TEST(Solve, ScalingsAcrossTheViscositySweep) {
  // || d(T) ||_L2 ~ eps/delta, || d_x(T) ||_L2 ~ eps/delta^2,
  // sup |d(T)| ~ eps/delta^{3/2}; log-log slope against eps/delta within 1 +- 0.3
  // and fitted constants with bounded spread.
  const GasLaw law(2.0);
  const RiemannEndStates ends{{1.0, 0.0}, {4.0, 2.0}};
  const Grid1D grid(-20.0, 20.0, 1024);
  std::vector<double> lx, ly, c0, c1, ci;
  for (double eps : {0.04, 0.02, 0.01, 0.005}) {
    const double delta = std::pow(eps, 1.0 / 6.0);
    const RarefactionProfile prof(law, ends, delta);
    const HyperbolicWaveField f = solve(prof, eps, 1.0, 0.0, 1.0, grid);
    const std::vector<double>&d1 = f.d1.back(), &d2 = f.d2.back();
    double s0 = 0.0, s1 = 0.0, si = 0.0;
    for (std::size_t j = 0; j < grid.n; ++j) {
      s0 += d1[j] * d1[j] + d2[j] * d2[j];
      si = std::max(si, std::max(std::abs(d1[j]), std::abs(d2[j])));
      if (j + 1 < grid.n) {
        const double g1 = (d1[j + 1] - d1[j]) / grid.h;
        const double g2 = (d2[j + 1] - d2[j]) / grid.h;
        s1 += g1 * g1 + g2 * g2;
      }
    }
    const double n0 = std::sqrt(grid.h * s0), n1 = std::sqrt(grid.h * s1);
    lx.push_back(std::log(eps / delta));
    ly.push_back(std::log(n0));
    c0.push_back(n0 / (eps / delta));
    c1.push_back(n1 / (eps / (delta * delta)));
    ci.push_back(si / (eps / std::pow(delta, 1.5)));
  }
  const double slope = lsq_slope(lx, ly);
  EXPECT_GE(slope, 0.7);
  EXPECT_LE(slope, 1.3);
  EXPECT_LE(spread(c0), 2.0);
  EXPECT_LE(spread(c1), 2.0);
  EXPECT_LE(spread(ci), 2.5);
}

TEST(Solve, FirstOrderGridConvergence) {
  const GasLaw law(2.0);
  const RiemannEndStates ends{{1.0, 0.0}, {4.0, 2.0}};
  const double eps = 0.02;
  const RarefactionProfile prof(law, ends, std::pow(eps, 1.0 / 6.0));
  auto run = [&](int n) { return solve(prof, eps, 1.0, 0.0, 0.5, Grid1D(-8.0, 8.0, n)); };
  const HyperbolicWaveField fc = run(512), fm = run(1024), ff = run(2048);
  auto diff = [](const HyperbolicWaveField& fine, const HyperbolicWaveField& coarse) {
    double s = 0.0;
    for (std::size_t j = 0; j < coarse.grid.n; ++j) {
      const double a1 = 0.5 * (fine.d1.back()[2 * j] + fine.d1.back()[2 * j + 1]);
      const double a2 = 0.5 * (fine.d2.back()[2 * j] + fine.d2.back()[2 * j + 1]);
      const double e1 = a1 - coarse.d1.back()[j], e2 = a2 - coarse.d2.back()[j];
      s += e1 * e1 + e2 * e2;
    }
    return std::sqrt(coarse.grid.h * s);
  };
  const double ec = diff(fm, fc), ef = diff(ff, fm);
  const double order = std::log2(ec / ef);
  EXPECT_GE(order, 0.8);
  EXPECT_LE(order, 1.6);
}

}  // namespace
