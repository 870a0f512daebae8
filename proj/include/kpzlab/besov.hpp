#pragma once

// Littlewood-Paley calculus on the torus: a fixed smooth dyadic partition of
// unity, blocks, Besov norms, Bony paraproducts and regularity regression.
//
// Band-limited series are held as ModeMap (coefficients over Z) so that
// products are exact convolutions without aliasing. Fields on a lattice are
// bridged through to_mode_map / to_spectral.

#include <string>
#include <vector>

#include "kpzlab/grid.hpp"

namespace kpzlab {

/// C-infinity step: 0 for x <= 0, 1 for x >= 1.
double smooth_step(double x);
/// Low-frequency bump: 1 on |x| <= 1, 0 on |x| >= 3/2.
double lp_chi(double x);
/// Annulus bump chi(x/2) - chi(x), supported on 1 < |x| < 3.
double lp_rho(double x);

/// Window of block j at wavenumber k; j = -1 is the low-frequency block.
double lp_window(int j, double k);
/// Window of S_j = sum_{i <= j-1} Delta_i, i.e. chi(k / 2^j) (j >= 0), 0 for j < 0.
double lp_low_pass(int j, double k);

struct DyadicPartition {
  int j_max;
  /// Windows tabulated on integer modes 0 ... k_max (all are even in k).
  int k_max;
  std::vector<double> chi;
  std::vector<std::vector<double>> rho;  // rho[j][k], j = 0 ... j_max

  double window(int j, long long k) const;
};

/// Tables up to k_max = 3 * 2^j_max; the windows sum to 1 for |k| <= 2^{j_max + 1}.
DyadicPartition build_partition(int j_max);
/// Smallest j_max whose windows sum to 1 on every |k| <= max_mode.
int blocks_for_band(long long max_mode);

long long band(const ModeMap& u);
ModeMap to_mode_map(const SpectralField& u);
/// Throws std::invalid_argument if a coefficient falls outside the grid.
SpectralField to_spectral(const ModeMap& u, const GridSpec& grid);

ModeMap lp_block(const ModeMap& u, int j);
SpectralField lp_block(const SpectralField& u, int j);

/// ||v||_{L^p(T)} by lattice quadrature eps * sum |v|^p; p = infinity gives the max.
double lattice_lp_norm(const LatticeField& v, double p);

/// Block norms b_j = ||Delta_j u||_{L^p}, j = -1 ... j_max.
struct BesovProfile {
  double p;
  std::vector<double> block_norms;  // index j + 1
  int j_max() const { return static_cast<int>(block_norms.size()) - 2; }
  double at(int j) const { return block_norms[static_cast<std::size_t>(j + 1)]; }
};

/// Blocks are evaluated on the field's own lattice.
BesovProfile besov_profile(const SpectralField& u, double p);
/// Samples each block on the smallest odd grid of at least 4 * band + 1 points.
BesovProfile besov_profile(const ModeMap& u, double p);

/// (sum_j (2^{j alpha} b_j)^q)^{1/q}; q = infinity gives the supremum.
double besov_norm(const BesovProfile& profile, double alpha, double q);
double besov_norm(const SpectralField& u, double alpha, double p, double q);
double besov_norm(const ModeMap& u, double alpha, double p, double q);

/// Exact product: (fg)^(k) = (2 pi)^{-1} sum_m f^(m) g^(k - m).
ModeMap multiply(const ModeMap& f, const ModeMap& g);

struct Paraproducts {
  ModeMap less;      // f < g = sum_j S_{j-1} f Delta_j g
  ModeMap greater;   // f > g = g < f
  ModeMap resonant;  // sum_{|i-j| <= 1} Delta_i f Delta_j g
};

/// output_band < 0 means band(f) + band(g). A smaller output band cannot hold
/// the product and is rejected with std::invalid_argument.
Paraproducts paraproducts(const ModeMap& f, const ModeMap& g, long long output_band = -1);
ModeMap paraproduct_less(const ModeMap& f, const ModeMap& g);
ModeMap resonant_product(const ModeMap& f, const ModeMap& g);

/// (f < g) o h - f (g o h).
ModeMap commutator(const ModeMap& f, const ModeMap& g, const ModeMap& h);

struct RegularityFit {
  double alpha_hat;
  double r_squared;
  int j_lo;
  int j_hi;
  /// Ensemble mean of b_j for j = -1 ... j_max.
  BesovProfile mean_profile;
};

/// Regresses log2 of the ensemble-mean block norms on j over [j_lo, j_hi];
/// alpha_hat = -slope. j_lo = j_hi = -2 selects [3, j_max - 2]. Throws
/// std::invalid_argument if the range is outside the available blocks or
/// has fewer than two points.
RegularityFit estimate_regularity(const std::vector<BesovProfile>& profiles, int j_lo = -2, int j_hi = -2);
RegularityFit estimate_regularity(const std::vector<SpectralField>& ensemble, double p, int j_lo = -2,
                                  int j_hi = -2);

}  // namespace kpzlab
