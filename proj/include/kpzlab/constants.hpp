#pragma once

// Deterministic evaluation of the scheme correction constant, the KPZ
// renormalization constant, the contracted vertex function, the zero-chaos
// Riemann sum of the discrete resonant product, and the KPZ cancellation.

#include "kpzlab/grid.hpp"
#include "kpzlab/noise.hpp"
#include "kpzlab/quadrature.hpp"
#include "kpzlab/scheme.hpp"

namespace kpzlab {

/// Below this radius removable singularities are replaced by their limits.
inline constexpr double kRemovableRadius = 1e-6;

/// [Im(g h_bar)(x) / x] * [h(x, -x) |g(x)|^2 / f(x)^2].
double correction_integrand(const SymbolTable& sym, double x);

/// c = -(4 pi)^{-1} int_0^pi correction_integrand(x) dx.
QuadratureResult correction_constant_detail(const Scheme& scheme, const QuadratureSpec& quad = {});
double correction_constant(const Scheme& scheme, const QuadratureSpec& quad = {});

struct RenormConstant {
  double continuum;    // (4 pi eps)^{-1} int phi^2
  double lattice_sum;  // (4 pi)^{-1} sum_{|k| < N/2} phi(eps k)^2
};

/// eps is tied to the grid, eps = 2 pi / N.
RenormConstant renormalization_constant(const Mollifier& m, const GridSpec& grid,
                                        const QuadratureSpec& quad = {});

struct KernelParams {
  int k_trunc = 256;
  /// Upper limit of the time integral; 0 picks the smallest power of two
  /// whose tail bound is below the quadrature tolerance.
  double t_trunc = 0.0;
};

/// S(sigma, k) with V(sigma, k) = i S(sigma, k) for sigma >= 0:
/// S = sum_{k2 != 0} [(k + k2) e^{-sigma (k+k2)^2} - k2 e^{-sigma k2^2}] e^{-sigma k2^2}.
/// Uses the truncated mode sum when its tail is negligible and the
/// Poisson-resummed form otherwise.
double vertex_contracted(double sigma, int k, int k_trunc = 256);
/// Direct truncated mode sum, no resummation.
double vertex_contracted_direct(double sigma, int k, int k_trunc);
/// Bound on the part of the mode sum beyond |k2| > k_trunc.
double vertex_truncation_tail(double sigma, int k, int k_trunc);

struct VertexL1 {
  double value;       // int_0^T |V(sigma, k)| d sigma
  double tail_bound;  // bound on int_T^infty |V|
  double t_trunc;
  QuadratureResult quad;
};

/// Throws QuadratureError if the time tail exceeds the tolerance.
VertexL1 vertex_l1_norm(int k, const KernelParams& params = {}, const QuadratureSpec& quad = {});

/// (2 pi)^{-1} (-eps) sum_{0<k<N/2} [Im(g h_bar)(eps k)/(eps k)] [h(eps k, -eps k) |g|^2 / (2 f^2)]
///   * (1 - exp(-2 k^2 f(eps k) t)).
double discrete_zero_chaos(const Scheme& scheme, int n, double t);

struct Cancellation {
  /// Term-by-term symmetrized double sum, per unit time.
  double symmetric_zero;
  /// sum of |first diagram| over the same range, for scaling.
  double scale;
  double first_diagram_sum;
  double second_diagram_sum;
  /// -2 int int [...] / (k1^2 + k2^2 + (k1+k2)^2), per unit time.
  double regularized_limit;
  /// Same at a ten times tighter tolerance.
  double regularized_limit_refined;
  QuadratureResult quad;
};

/// Integrand of the regularized limit after pairing (k1, k2) with (-k2, -k1).
double cancellation_integrand(const Mollifier& m, double k1, double k2);
/// The same integrand before pairing (principal-value singular on k1 + k2 = 0).
double cancellation_integrand_raw(const Mollifier& m, double k1, double k2);

double cancellation_limit(const Mollifier& m, const QuadratureSpec& quad, QuadratureResult* detail = nullptr);
Cancellation kpz_cancellation(const Mollifier& m, int k_trunc = 64, const QuadratureSpec& quad = {1e-7, 1 << 22});

}  // namespace kpzlab
