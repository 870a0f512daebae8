#include "kpzlab/besov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kpzlab {

namespace {

double glue(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double lp_norm_of(std::span<const cplx> v, double eps, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (const cplx& z : v) m = std::max(m, std::abs(z));
    return m;
  }
  double s = 0.0;
  for (const cplx& z : v) s += std::pow(std::abs(z), p);
  return std::pow(eps * s, 1.0 / p);
}

int odd_sampling_size(long long band) {
  long long n = 4 * band + 1;
  return static_cast<int>(std::max(n, 3LL));
}

}  // namespace

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = glue(x), b = glue(1.0 - x);
  return a / (a + b);
}

double lp_chi(double x) { return 1.0 - smooth_step((std::abs(x) - 1.0) / 0.5); }

double lp_rho(double x) { return lp_chi(x / 2.0) - lp_chi(x); }

double lp_window(int j, double k) {
  if (j < -1) return 0.0;
  if (j == -1) return lp_chi(k);
  return lp_rho(std::ldexp(k, -j));
}

double lp_low_pass(int j, double k) { return j < 0 ? 0.0 : lp_chi(std::ldexp(k, -j)); }

double DyadicPartition::window(int j, long long k) const {
  const long long a = k < 0 ? -k : k;
  if (a > k_max) return j == -1 ? 0.0 : lp_window(j, static_cast<double>(a));
  if (j == -1) return chi[static_cast<std::size_t>(a)];
  if (j < 0 || j > j_max) return lp_window(j, static_cast<double>(a));
  return rho[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)];
}

DyadicPartition build_partition(int j_max) {
  if (j_max < 0) throw std::invalid_argument("build_partition: j_max must be >= 0");
  DyadicPartition part;
  part.j_max = j_max;
  part.k_max = 3 << j_max;
  part.chi.resize(static_cast<std::size_t>(part.k_max) + 1);
  part.rho.assign(static_cast<std::size_t>(j_max) + 1, std::vector<double>(part.chi.size()));
  for (int k = 0; k <= part.k_max; ++k) {
    part.chi[static_cast<std::size_t>(k)] = lp_chi(k);
    for (int j = 0; j <= j_max; ++j) part.rho[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = lp_window(j, k);
  }
  return part;
}

int blocks_for_band(long long max_mode) {
  int j = 0;
  while ((2LL << j) < max_mode) ++j;
  return j;
}

long long band(const ModeMap& u) {
  long long b = 0;
  for (const auto& [k, c] : u) {
    if (c != cplx{}) b = std::max(b, k < 0 ? -k : k);
  }
  return b;
}

ModeMap to_mode_map(const SpectralField& u) {
  ModeMap out;
  for (int k = -u.grid().max_mode(); k <= u.grid().max_mode(); ++k) {
    if (u.at(k) != cplx{}) out[k] = u.at(k);
  }
  return out;
}

SpectralField to_spectral(const ModeMap& u, const GridSpec& grid) {
  bool hermitian = true;
  for (const auto& [k, c] : u) {
    if (!grid.contains(k)) throw std::invalid_argument("to_spectral: mode outside the grid");
    const auto it = u.find(-k);
    const cplx partner = it == u.end() ? cplx{} : it->second;
    if (partner != std::conj(c)) hermitian = false;
  }
  SpectralField out(grid, hermitian);
  for (const auto& [k, c] : u) out.at(static_cast<int>(k)) = c;
  return out;
}

ModeMap lp_block(const ModeMap& u, int j) {
  ModeMap out;
  for (const auto& [k, c] : u) {
    const double w = lp_window(j, static_cast<double>(k));
    if (w != 0.0) out[k] = w * c;
  }
  return out;
}

SpectralField lp_block(const SpectralField& u, int j) {
  SpectralField out = u;
  for (int k = -u.grid().max_mode(); k <= u.grid().max_mode(); ++k) out.at(k) *= lp_window(j, k);
  return out;
}

double lattice_lp_norm(const LatticeField& v, double p) { return lp_norm_of(v.values(), v.grid().spacing(), p); }

BesovProfile besov_profile(const SpectralField& u, double p) {
  BesovProfile prof{p, {}};
  const int j_max = blocks_for_band(u.grid().max_mode());
  for (int j = -1; j <= j_max; ++j) prof.block_norms.push_back(lattice_lp_norm(dft_inverse(lp_block(u, j)), p));
  return prof;
}

BesovProfile besov_profile(const ModeMap& u, double p) {
  const long long b = band(u);
  const GridSpec grid(odd_sampling_size(b));
  return besov_profile(to_spectral(u, grid), p);
}

double besov_norm(const BesovProfile& profile, double alpha, double q) {
  double acc = 0.0;
  for (int j = -1; j <= profile.j_max(); ++j) {
    const double term = std::exp2(j * alpha) * profile.at(j);
    if (std::isinf(q)) {
      acc = std::max(acc, term);
    } else {
      acc += std::pow(term, q);
    }
  }
  return std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
}

double besov_norm(const SpectralField& u, double alpha, double p, double q) {
  return besov_norm(besov_profile(u, p), alpha, q);
}

double besov_norm(const ModeMap& u, double alpha, double p, double q) {
  return besov_norm(besov_profile(u, p), alpha, q);
}

ModeMap multiply(const ModeMap& f, const ModeMap& g) {
  ModeMap out;
  for (const auto& [a, fa] : f) {
    for (const auto& [b, gb] : g) out[a + b] += fa * gb / kTwoPi;
  }
  return out;
}

Paraproducts paraproducts(const ModeMap& f, const ModeMap& g, long long output_band) {
  const long long needed = band(f) + band(g);
  if (output_band >= 0 && output_band < needed) {
    throw std::invalid_argument("paraproducts: output band " + std::to_string(output_band) +
                                " cannot hold a product of band " + std::to_string(needed));
  }
  const int j_max = blocks_for_band(std::max(band(f), band(g)));
  const int nb = j_max + 2;  // blocks -1 ... j_max

  auto windows = [&](long long k) {
    std::vector<double> w(static_cast<std::size_t>(nb));
    for (int j = -1; j <= j_max; ++j) w[static_cast<std::size_t>(j + 1)] = lp_window(j, static_cast<double>(k));
    return w;
  };
  auto lows = [&](long long k) {
    // lows[j + 1] = window of S_{j-1} = sum_{i <= j-2} Delta_i
    std::vector<double> s(static_cast<std::size_t>(nb));
    for (int j = -1; j <= j_max; ++j) s[static_cast<std::size_t>(j + 1)] = lp_low_pass(j - 1, static_cast<double>(k));
    return s;
  };

  Paraproducts out;
  for (const auto& [a, fa] : f) {
    const auto wa = windows(a);
    const auto sa = lows(a);
    for (const auto& [b, gb] : g) {
      const auto wb = windows(b);
      const auto sb = lows(b);
      double less = 0.0, greater = 0.0, res = 0.0;
      for (int j = 0; j < nb; ++j) {
        less += sa[static_cast<std::size_t>(j)] * wb[static_cast<std::size_t>(j)];
        greater += wa[static_cast<std::size_t>(j)] * sb[static_cast<std::size_t>(j)];
        for (int i = std::max(0, j - 1); i <= std::min(nb - 1, j + 1); ++i) {
          res += wa[static_cast<std::size_t>(i)] * wb[static_cast<std::size_t>(j)];
        }
      }
      const cplx prod = fa * gb / kTwoPi;
      const long long k = a + b;
      if (less != 0.0) out.less[k] += less * prod;
      if (greater != 0.0) out.greater[k] += greater * prod;
      if (res != 0.0) out.resonant[k] += res * prod;
    }
  }
  return out;
}

ModeMap paraproduct_less(const ModeMap& f, const ModeMap& g) { return paraproducts(f, g).less; }

ModeMap resonant_product(const ModeMap& f, const ModeMap& g) { return paraproducts(f, g).resonant; }

ModeMap commutator(const ModeMap& f, const ModeMap& g, const ModeMap& h) {
  ModeMap out = resonant_product(paraproduct_less(f, g), h);
  for (const auto& [k, c] : multiply(f, resonant_product(g, h))) out[k] -= c;
  return out;
}

RegularityFit estimate_regularity(const std::vector<BesovProfile>& profiles, int j_lo, int j_hi) {
  if (profiles.empty()) throw std::invalid_argument("estimate_regularity: empty ensemble");
  const int j_max = profiles.front().j_max();
  if (j_lo == -2 && j_hi == -2) {
    j_lo = 3;
    j_hi = j_max - 2;
  }
  if (j_lo < -1 || j_hi > j_max || j_hi - j_lo < 1) {
    throw std::invalid_argument("estimate_regularity: fit range [" + std::to_string(j_lo) + ", " +
                                std::to_string(j_hi) + "] outside blocks -1.." + std::to_string(j_max));
  }
  RegularityFit fit{0.0, 0.0, j_lo, j_hi, {profiles.front().p, std::vector<double>(profiles.front().block_norms.size())}};
  for (const BesovProfile& p : profiles) {
    if (p.j_max() != j_max) throw std::invalid_argument("estimate_regularity: profiles differ in length");
    for (std::size_t i = 0; i < p.block_norms.size(); ++i) fit.mean_profile.block_norms[i] += p.block_norms[i];
  }
  for (double& b : fit.mean_profile.block_norms) b /= static_cast<double>(profiles.size());

  const int n = j_hi - j_lo + 1;
  double sx = 0, sy = 0;
  std::vector<double> ys;
  for (int j = j_lo; j <= j_hi; ++j) {
    ys.push_back(std::log2(fit.mean_profile.at(j)));
    sx += j;
    sy += ys.back();
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int j = j_lo; j <= j_hi; ++j) {
    const double dx = j - mx, dy = ys[static_cast<std::size_t>(j - j_lo)] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double slope = sxy / sxx;
  fit.alpha_hat = -slope;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

RegularityFit estimate_regularity(const std::vector<SpectralField>& ensemble, double p, int j_lo, int j_hi) {
  std::vector<BesovProfile> profiles;
  profiles.reserve(ensemble.size());
  for (const SpectralField& u : ensemble) profiles.push_back(besov_profile(u, p));
  return estimate_regularity(profiles, j_lo, j_hi);
}

}  // namespace kpzlab
