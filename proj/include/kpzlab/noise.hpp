#pragma once

// Counter-based Gaussian noise, spectral mollifiers and Gaussian initial data.
//
// Noise convention: one Fourier mode of a white-noise increment over dt has
// E|dW^(k)|^2 = 2 pi dt (real and imaginary parts of variance pi dt each for
// k != 0, Hermitian partner at -k, real mode 0 of variance 2 pi dt). This is
// the law of eps^{-1/2} F_N W_N(dt) for an N-dimensional standard Brownian
// motion W_N on the lattice.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kpzlab/grid.hpp"
#include "kpzlab/scheme.hpp"

namespace kpzlab {

/// Philox4x32-10 keyed by the seed; the 128-bit counter is (stream, block).
/// The n-th draw depends only on (seed, stream, n).
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }
  /// Number of 128-bit blocks consumed so far.
  std::uint64_t counter() const { return block_; }

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Box-Muller on two uniforms).
  double normal();

  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> ctr,
                                             std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

enum class MollifierKind { indicator, bump };

/// Even, bounded, compactly supported cutoff with phi(0) = 1.
class Mollifier {
 public:
  explicit Mollifier(MollifierKind kind);
  static Mollifier by_name(const std::string& name);

  MollifierKind kind() const { return kind_; }
  std::string name() const;
  double operator()(double x) const;
  /// d/dx phi(x)^2 (zero almost everywhere for the indicator).
  double square_derivative(double x) const;
  /// phi(a)^2 - phi(b)^2 without cancellation when a is close to +-b.
  double square_difference(double a, double b) const;
  double support_radius() const { return 1.0; }
  /// Points where phi is not smooth (support boundary).
  std::vector<double> breakpoints() const { return {-1.0, 1.0}; }

 private:
  MollifierKind kind_;
};

SpectralField apply_mollifier(const Mollifier& m, const SpectralField& u, double eps_reg);

/// Per-mode white-noise increment over dt; throws std::invalid_argument if dt <= 0.
SpectralField white_increment(const GridSpec& grid, double dt, NoiseStream& stream);

/// Stationary law of the linear lattice equation du = Delta_N u dt + D_N dW:
/// independent modes with E|X^(k)|^2 = pi |g(eps k)|^2 / f(eps k), X^(0) = 0.
/// Throws std::invalid_argument when the Laplacian stencil fails its checks.
SpectralField stationary_ou_init(const GridSpec& grid, const Scheme& scheme, NoiseStream& stream);

/// Product Gaussian measure on the lattice: i.i.d. sites with the given mean and
/// variance eps^{-1} / 2 (the white-noise invariant measure).
LatticeField sample_white_noise_measure(const GridSpec& grid, double mean, NoiseStream& stream);

/// Standard complex Gaussians driving one time step: for each k >= 0 two
/// independent variates with E|z|^2 = 1 (real for k = 0). Modes k < 0 are
/// Hermitian partners and are not stored.
struct StepNoise {
  std::vector<cplx> primary;
  std::vector<cplx> secondary;
};

StepNoise draw_step_noise(const GridSpec& grid, NoiseStream& stream);

}  // namespace kpzlab
