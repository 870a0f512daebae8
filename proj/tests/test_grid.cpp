#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kpzlab/grid.hpp"

using namespace kpzlab;

namespace {

// Direct O(N^2) evaluation of the forward transform.
std::vector<cplx> direct_forward(const LatticeField& u) {
  const GridSpec& g = u.grid();
  std::vector<cplx> out(static_cast<std::size_t>(g.size()));
  for (int k = -g.max_mode(); k <= g.max_mode(); ++k) {
    cplx acc{};
    for (int l = 0; l < g.size(); ++l) acc += u[static_cast<std::size_t>(l)] * std::polar(1.0, -g.spacing() * l * k);
    out[g.index(k)] = g.spacing() * acc;
  }
  return out;
}

LatticeField random_field(const GridSpec& g, std::mt19937_64& rng, bool real) {
  std::normal_distribution<double> nd;
  LatticeField u(g);
  for (auto& z : u.values()) z = cplx(nd(rng), real ? 0.0 : nd(rng));
  return u;
}

}  // namespace

TEST(GridSpec, RejectsEvenAndNonPositiveSizes) {
  EXPECT_THROW(GridSpec(64), std::invalid_argument);
  EXPECT_THROW(GridSpec(0), std::invalid_argument);
  EXPECT_THROW(GridSpec(-3), std::invalid_argument);
  const GridSpec g(63);
  EXPECT_EQ(g.max_mode(), 31);
  EXPECT_DOUBLE_EQ(g.spacing(), kTwoPi / 63);
  EXPECT_EQ(g.index(-31), 0u);
  EXPECT_EQ(g.mode(62), 31);
}

TEST(Dft, MatchesDirectSumOracle) {
  std::mt19937_64 rng(1);
  for (int n : {1, 3, 15, 63, 101}) {
    const GridSpec g(n);
    const LatticeField u = random_field(g, rng, false);
    const SpectralField f = dft_forward(u);
    const auto ref = direct_forward(u);
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_LT(std::abs(f.coeff()[i] - ref[i]), 1e-12 * n) << n;
  }
}

TEST(Dft, RoundTripIsIdentity) {
  std::mt19937_64 rng(2);
  for (int n : {15, 63, 1023}) {
    const GridSpec g(n);
    const LatticeField u = random_field(g, rng, false);
    const LatticeField v = dft_inverse(dft_forward(u));
    for (std::size_t l = 0; l < u.values().size(); ++l) EXPECT_LT(std::abs(u[l] - v[l]), 1e-12);
  }
}

TEST(Dft, Parseval) {
  std::mt19937_64 rng(3);
  for (int n : {31, 255}) {
    const GridSpec g(n);
    const LatticeField u = random_field(g, rng, false);
    const SpectralField f = dft_forward(u);
    double spectral = 0.0;
    for (const cplx& c : f.coeff()) spectral += std::norm(c);
    // eps sum |u|^2 = (2 pi)^{-1} sum |u^|^2
    EXPECT_NEAR(lattice_l2_squared(u), spectral / kTwoPi, 1e-11 * spectral);
  }
}

TEST(Dft, RealInputGivesHermitianCoefficients) {
  std::mt19937_64 rng(4);
  const GridSpec g(31);
  const SpectralField f = dft_forward(random_field(g, rng, true));
  EXPECT_TRUE(f.real_flag());
  EXPECT_LT(f.hermitian_defect(), 1e-14);
  EXPECT_DOUBLE_EQ(f.at(0).imag(), 0.0);
}

TEST(Dft, SingleModeHasCoefficientTwoPi) {
  const GridSpec g(33);
  LatticeField u(g);
  for (int l = 0; l < g.size(); ++l) u[static_cast<std::size_t>(l)] = std::polar(1.0, 5.0 * g.site(l));
  const SpectralField f = dft_forward(u);
  for (int k = -g.max_mode(); k <= g.max_mode(); ++k) {
    EXPECT_NEAR(std::abs(f.at(k) - (k == 5 ? cplx(kTwoPi, 0) : cplx{})), 0.0, 1e-12);
  }
}

TEST(FoldMode, PeriodicAndIdempotent) {
  for (int n : {3, 15, 63}) {
    const GridSpec g(n);
    for (long long k = -5LL * n; k <= 5LL * n; ++k) {
      const int f = fold_mode(k, g);
      EXPECT_TRUE(g.contains(f));
      EXPECT_EQ(f, fold_mode(k + n, g));
      EXPECT_EQ(f, fold_mode(f, g));
      EXPECT_EQ(((k - f) % n + n) % n, 0);
    }
  }
}

TEST(Extend, InterpolatesLatticeValues) {
  std::mt19937_64 rng(5);
  const GridSpec g(21);
  const LatticeField u = random_field(g, rng, true);
  const SpectralField f = dft_forward(u);
  for (int l = 0; l < g.size(); ++l) EXPECT_NEAR(std::abs(extend(f, g.site(l)) - u[static_cast<std::size_t>(l)]), 0.0, 1e-12);
}

TEST(Periodize, FoldsAliasedModes) {
  const GridSpec g(7);
  const ModeMap m{{1, 1.0}, {8, 2.0}, {-6, 3.0}, {10, 4.0}};
  const SpectralField p = periodize(m, g);
  EXPECT_EQ(p.at(1), cplx(6.0));
  EXPECT_EQ(p.at(3), cplx(4.0));
  const ModeMap c = cutoff(m, g);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.at(1), cplx(1.0));
}

TEST(Periodize, SamplingEqualsLatticeValuesOfSeries) {
  // The lattice samples of any finite series equal the inverse transform of its periodization.
  const GridSpec g(9);
  const ModeMap m{{2, cplx(1.0, 0.5)}, {11, cplx(-0.3, 0.2)}, {-25, cplx(0.7, 0.0)}};
  const LatticeField x = dft_inverse(periodize(m, g));
  for (int l = 0; l < g.size(); ++l) {
    cplx direct{};
    for (const auto& [k, c] : m) direct += c * std::polar(1.0, static_cast<double>(k) * g.site(l));
    EXPECT_NEAR(std::abs(x[static_cast<std::size_t>(l)] - direct / kTwoPi), 0.0, 1e-13);
  }
}

TEST(SpectralField, Arithmetic) {
  const GridSpec g(5);
  SpectralField a(g), b(g);
  a.at(1) = 2.0;
  b.at(1) = 3.0;
  const SpectralField c = 2.0 * (a + b) - a;
  EXPECT_EQ(c.at(1), cplx(8.0));
  SpectralField d(g);
  d.at(2) = cplx(1.0, 1.0);
  d.at(-2) = cplx(3.0, 1.0);
  d.enforce_hermitian();
  EXPECT_EQ(d.at(2), std::conj(d.at(-2)));
}
