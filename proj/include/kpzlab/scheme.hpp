#pragma once

// Lattice discretizations (Delta_N, D_N, B_N) generated by a triple of finite
// measures (pi, nu, mu), their Fourier symbols (f, g, h), the hypothesis
// checks on the measures, and the spectral / physical-space operators.

#include <string>
#include <vector>

#include "kpzlab/grid.hpp"

namespace kpzlab {

struct Atom {
  int offset;
  double weight;
};

struct PairAtom {
  int y;
  int z;
  double weight;
};

struct Scheme {
  std::string name;
  std::vector<Atom> pi;      // Laplacian stencil
  std::vector<Atom> nu;      // derivative stencil
  std::vector<PairAtom> mu;  // bilinear form
};

struct HypothesisCheck {
  std::string name;
  bool passed;
  std::string detail;
};

struct ValidationReport {
  std::vector<HypothesisCheck> checks;
  /// min of f over [-pi, pi] on the check grid (the positivity margin).
  double min_symbol;
  bool ok() const;
  bool passed(const std::string& name) const;
};

/// Checks the stencil conditions on all three measures. Failures are reported, never thrown.
ValidationReport validate(const Scheme& scheme);

/// Discrete Laplacian, backward difference, pointwise product.
Scheme preset_standard();
/// Two-site averaged product; throws std::invalid_argument unless
/// kappa, lambda >= 0 and kappa + lambda > 0.
Scheme preset_sasamoto_spohn(double kappa = 1.0, double lambda = 0.5);
/// Centered finite differences of the given even order (2, 4, ..., 16) with the
/// pointwise product. High orders are close to the exact Fourier multipliers.
Scheme preset_centered(int order);

/// Fourier symbols of a scheme. Removable singularities at 0 are resolved by
/// rewriting each sum in sinc form, so the values near 0 are as accurate as
/// anywhere else.
class SymbolTable {
 public:
  explicit SymbolTable(Scheme scheme);

  const Scheme& scheme() const { return scheme_; }

  /// f(x) = int e^{ixy} pi(dy) / (-x^2), even part.
  double f(double x) const;
  /// g(x) = int e^{ixy} nu(dy) / (ix).
  cplx g(double x) const;
  /// h(x1, x2) = int e^{i(x1 y + x2 z)} mu(dy, dz).
  cplx h(double x1, double x2) const;
  cplx h_bar(double x) const { return h(x, 0.0); }

  /// lim_{x -> 0} Im(g(x) h_bar(x)) / x.
  double im_g_hbar_slope() const;

 private:
  Scheme scheme_;
};

// Spectral operators (the defining contract).
SpectralField apply_laplacian(const SymbolTable& s, const SpectralField& u);
SpectralField apply_derivative(const SymbolTable& s, const SpectralField& u);
/// Reference O(N^2) folded convolution with the weights h(eps l, eps m).
SpectralField apply_bilinear(const SymbolTable& s, const SpectralField& u, const SpectralField& v);
/// Same result computed through the lattice: transform, stencil, transform.
SpectralField apply_bilinear_fast(const SymbolTable& s, const SpectralField& u,
                                  const SpectralField& v);

// Physical-space definitions on lattice fields.
LatticeField laplacian_stencil(const Scheme& s, const LatticeField& u);
LatticeField derivative_stencil(const Scheme& s, const LatticeField& u);
LatticeField bilinear_stencil(const Scheme& s, const LatticeField& u, const LatticeField& v);

/// <a, b>_{T_N} = eps * sum_x a(x) conj(b(x)).
cplx lattice_inner(const LatticeField& a, const LatticeField& b);

/// |<phi, D_N B_N(phi, phi)>| divided by eps * sum |phi| |D_N B_N(phi, phi)|.
/// Zero up to rounding for energy-conserving schemes.
double conservation_residual(const Scheme& s, const LatticeField& phi);

}  // namespace kpzlab
