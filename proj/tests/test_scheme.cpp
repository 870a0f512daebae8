#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kpzlab/scheme.hpp"

using namespace kpzlab;

namespace {

LatticeField random_real(const GridSpec& g, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  LatticeField u(g);
  for (auto& z : u.values()) z = nd(rng);
  return u;
}

double max_gap(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.coeff().size(); ++i) m = std::max(m, std::abs(a.coeff()[i] - b.coeff()[i]));
  return m;
}

double max_abs(const SpectralField& a) {
  double m = 0.0;
  for (const cplx& c : a.coeff()) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

TEST(Validate, PresetsSatisfyAllHypotheses) {
  for (const Scheme& s : {preset_standard(), preset_sasamoto_spohn(), preset_sasamoto_spohn(0.0, 1.0),
                          preset_centered(2), preset_centered(8), preset_centered(16)}) {
    const ValidationReport r = validate(s);
    EXPECT_TRUE(r.ok()) << s.name;
    EXPECT_GT(r.min_symbol, 0.0) << s.name;
  }
}

TEST(Validate, ReportsEachBrokenHypothesis) {
  Scheme s = preset_standard();
  s.pi = {{-1, 1.0}, {0, -2.0}, {1, 1.5}};
  ValidationReport r = validate(s);
  EXPECT_FALSE(r.passed("laplacian.symmetric"));
  EXPECT_FALSE(r.passed("laplacian.mass_zero"));

  s = preset_standard();
  s.nu = {{0, 2.0}, {-1, -1.0}};
  r = validate(s);
  EXPECT_FALSE(r.passed("derivative.mass_zero"));
  EXPECT_TRUE(r.passed("laplacian.positive"));

  s = preset_standard();
  s.mu = {{0, 1, 0.7}, {1, 0, 0.3}};
  r = validate(s);
  EXPECT_FALSE(r.passed("product.exchangeable"));
  EXPECT_TRUE(r.passed("product.probability"));

  s.mu = {{0, 0, 1.5}, {1, 1, -0.5}};
  r = validate(s);
  EXPECT_FALSE(r.passed("product.nonnegative"));
  EXPECT_FALSE(r.ok());
}

TEST(Validate, InvalidTwoSiteParametersThrow) {
  EXPECT_THROW(preset_sasamoto_spohn(-1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(preset_sasamoto_spohn(0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(preset_sasamoto_spohn(1.0, std::nan("")), std::invalid_argument);
  EXPECT_THROW(preset_centered(3), std::invalid_argument);
  EXPECT_THROW(preset_centered(18), std::invalid_argument);
}

TEST(Symbols, MatchDirectSumsAwayFromZero) {
  for (const Scheme& s : {preset_standard(), preset_sasamoto_spohn(), preset_centered(6)}) {
    const SymbolTable t(s);
    for (double x : {-3.0, -1.3, -0.2, 0.05, 0.7, 2.9}) {
      cplx pi_sum{}, nu_sum{}, mu_sum{};
      for (const auto& a : s.pi) pi_sum += a.weight * std::polar(1.0, x * a.offset);
      for (const auto& a : s.nu) nu_sum += a.weight * std::polar(1.0, x * a.offset);
      for (const auto& a : s.mu) mu_sum += a.weight * std::polar(1.0, 0.3 * a.y + x * a.z);
      EXPECT_NEAR(t.f(x), (pi_sum / (-x * x)).real(), 1e-12);
      EXPECT_NEAR(std::abs(t.g(x) - nu_sum / cplx(0.0, x)), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(t.h(0.3, x) - mu_sum), 0.0, 1e-14);
    }
  }
}

TEST(Symbols, ContinuousAtZero) {
  for (const Scheme& s : {preset_standard(), preset_sasamoto_spohn(), preset_centered(10)}) {
    const SymbolTable t(s);
    EXPECT_NEAR(t.f(0.0), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(t.g(0.0) - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(t.h_bar(0.0) - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(t.f(1e-9), t.f(0.0), 1e-12);
    EXPECT_NEAR(std::abs(t.g(1e-9) - t.g(0.0)), 0.0, 1e-8);
  }
}

TEST(Symbols, SlopeOfImaginaryPartMatchesFiniteDifference) {
  for (const Scheme& s : {preset_standard(), preset_sasamoto_spohn(), preset_centered(4)}) {
    const SymbolTable t(s);
    const double x = 1e-5;
    EXPECT_NEAR(std::imag(t.g(x) * t.h_bar(x)) / x, t.im_g_hbar_slope(), 1e-6) << s.name;
  }
}

TEST(Operators, SpectralAgreesWithStencils) {
  std::mt19937_64 rng(11);
  for (const Scheme& s : {preset_standard(), preset_sasamoto_spohn(), preset_centered(8)}) {
    const SymbolTable t(s);
    for (int n : {15, 31}) {
      const GridSpec g(n);
      const LatticeField u = random_real(g, rng), v = random_real(g, rng);
      const SpectralField uh = dft_forward(u), vh = dft_forward(v);
      const double su = max_abs(uh);
      const double eps = g.spacing();
      EXPECT_LT(max_gap(apply_laplacian(t, uh), dft_forward(laplacian_stencil(s, u))), 1e-10 * su / (eps * eps));
      EXPECT_LT(max_gap(apply_derivative(t, uh), dft_forward(derivative_stencil(s, u))), 1e-10 * su / eps);
      const SpectralField ref = dft_forward(bilinear_stencil(s, u, v));
      const double sb = max_abs(ref);
      EXPECT_LT(max_gap(apply_bilinear(t, uh, vh), ref), 1e-11 * sb * n);
      EXPECT_LT(max_gap(apply_bilinear_fast(t, uh, vh), ref), 1e-12 * sb * n);
    }
  }
}

TEST(Conservation, TwoSiteDefaultConservesEnergy) {
  std::mt19937_64 rng(12);
  const Scheme s = preset_sasamoto_spohn();
  for (int n : {15, 31, 63}) {
    const GridSpec g(n);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) worst = std::max(worst, conservation_residual(s, random_real(g, rng)));
    EXPECT_LE(worst, 1e-11) << "N=" << n;
  }
}

TEST(Conservation, OnlyTheTwoToOneWeightingConserves) {
  // With the backward difference the cubic telescopes only when kappa = 2 lambda.
  std::mt19937_64 rng(15);
  const GridSpec g(31);
  EXPECT_LE(conservation_residual(preset_sasamoto_spohn(2.0, 1.0), random_real(g, rng)), 1e-11);
  EXPECT_GT(conservation_residual(preset_sasamoto_spohn(0.0, 1.0), random_real(g, rng)), 1e-6);
}

TEST(Conservation, PointwiseProductDoesNotConserve) {
  std::mt19937_64 rng(13);
  const GridSpec g(31);
  double best = 1.0;
  for (int trial = 0; trial < 20; ++trial) best = std::min(best, conservation_residual(preset_standard(), random_real(g, rng)));
  EXPECT_GT(best, 1e-6);
}

TEST(Operators, LatticeInnerIsHermitian) {
  std::mt19937_64 rng(14);
  const GridSpec g(15);
  const LatticeField a = random_real(g, rng), b = random_real(g, rng);
  EXPECT_NEAR(std::abs(lattice_inner(a, b) - std::conj(lattice_inner(b, a))), 0.0, 1e-14);
}
