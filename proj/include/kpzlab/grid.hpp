#pragma once

// Periodic lattice T_N = (eps Z) / (2 pi Z) with odd N, its discrete Fourier
// transform, and the extension / folding / cutoff operators between lattice
// fields and trigonometric series on the continuous torus.
//
// Fourier convention (used everywhere in kpzlab):
//   forward   u^(k) = eps * sum_l u(x_l) exp(-i eps l k),   x_l = eps * l
//   inverse   u(x)  = (2 pi)^{-1} * sum_{|k| < N/2} u^(k) exp(i k x)

#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace kpzlab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

class GridSpec {
 public:
  /// Throws std::invalid_argument unless n is odd and positive.
  explicit GridSpec(int n);

  int size() const { return n_; }
  double spacing() const { return eps_; }
  /// Largest wavenumber in K_N, i.e. (N - 1) / 2.
  int max_mode() const { return (n_ - 1) / 2; }
  bool contains(long long k) const { return k >= -max_mode() && k <= max_mode(); }

  /// Position of mode k in symmetric storage order (k = -M ... M).
  std::size_t index(int k) const { return static_cast<std::size_t>(k + max_mode()); }
  int mode(std::size_t i) const { return static_cast<int>(i) - max_mode(); }
  double site(int l) const { return eps_ * l; }

  bool operator==(const GridSpec& other) const { return n_ == other.n_; }

 private:
  int n_;
  double eps_;
};

/// The representative of k mod N inside K_N = {-(N-1)/2, ..., (N-1)/2}.
int fold_mode(long long k, const GridSpec& grid);

/// Samples at sites x_l = eps * l, l = 0 ... N-1.
class LatticeField {
 public:
  explicit LatticeField(GridSpec grid);
  LatticeField(GridSpec grid, std::vector<cplx> values);
  static LatticeField from_real(GridSpec grid, std::span<const double> values);

  const GridSpec& grid() const { return grid_; }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }
  cplx& operator[](std::size_t l) { return values_[l]; }
  const cplx& operator[](std::size_t l) const { return values_[l]; }

  std::vector<double> real_part() const;
  double max_abs() const;
  /// True when every imaginary part is exactly zero.
  bool is_real() const;

 private:
  GridSpec grid_;
  std::vector<cplx> values_;
};

/// Fourier coefficients on the symmetric mode set K_N.
class SpectralField {
 public:
  explicit SpectralField(GridSpec grid, bool real_flag = true);
  SpectralField(GridSpec grid, std::vector<cplx> coeff, bool real_flag);

  const GridSpec& grid() const { return grid_; }
  bool real_flag() const { return real_; }
  void set_real_flag(bool r) { real_ = r; }

  cplx& at(int k) { return coeff_[grid_.index(k)]; }
  const cplx& at(int k) const { return coeff_[grid_.index(k)]; }
  std::span<const cplx> coeff() const { return coeff_; }
  std::span<cplx> coeff() { return coeff_; }

  /// Sets c(-k) = conj(c(k)) for k > 0 (averaging the pair) and drops Im c(0).
  void enforce_hermitian();
  /// Largest |c(-k) - conj(c(k))| over the mode set.
  double hermitian_defect() const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);

 private:
  GridSpec grid_;
  std::vector<cplx> coeff_;
  bool real_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

SpectralField dft_forward(const LatticeField& u);
LatticeField dft_inverse(const SpectralField& f);

/// Evaluates the trigonometric polynomial E_N f at an arbitrary x.
cplx extend(const SpectralField& f, double x);

/// Coefficients indexed by arbitrary integer wavenumbers (finite support).
using ModeMap = std::map<long long, cplx>;

/// Pi_N: accumulates every coefficient at its folded mode.
SpectralField periodize(const ModeMap& coeff, const GridSpec& grid);
/// P_N: keeps only |k| < N/2.
ModeMap cutoff(const ModeMap& coeff, const GridSpec& grid);

/// Sum of |v|^2 weighted as eps * sum over sites.
double lattice_l2_squared(const LatticeField& u);

}  // namespace kpzlab
