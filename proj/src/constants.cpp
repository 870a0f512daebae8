#include "kpzlab/constants.hpp"

#include "kpzlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kpzlab {

double correction_integrand(const SymbolTable& sym, double x) {
  const cplx g = sym.g(x);
  const double weight = sym.h(x, -x).real() * std::norm(g) / (sym.f(x) * sym.f(x));
  if (std::abs(x) < kRemovableRadius) return sym.im_g_hbar_slope() * weight;
  return std::imag(g * sym.h_bar(x)) / x * weight;
}

QuadratureResult correction_constant_detail(const Scheme& scheme, const QuadratureSpec& quad) {
  const SymbolTable sym(scheme);
  QuadratureSpec spec = quad;
  // The prefactor 1 / (4 pi) is applied after integration.
  spec.abs_tol = quad.abs_tol * 4.0 * kPi;
  QuadratureResult r = adaptive_simpson([&](double x) { return correction_integrand(sym, x); }, 0.0, kPi, spec);
  r.value *= -1.0 / (4.0 * kPi);
  r.error_estimate /= 4.0 * kPi;
  return r;
}

double correction_constant(const Scheme& scheme, const QuadratureSpec& quad) {
  return correction_constant_detail(scheme, quad).value;
}

RenormConstant renormalization_constant(const Mollifier& m, const GridSpec& grid,
                                        const QuadratureSpec& quad) {
  const double eps = grid.spacing();
  std::vector<double> pts = m.breakpoints();
  pts.push_back(0.0);
  const QuadratureResult r = adaptive_simpson(
      [&](double x) {
        const double p = m(x);
        return p * p;
      },
      pts, quad);
  return {r.value / (4.0 * kPi * eps), lattice_renorm_sum(m, eps, grid)};
}

// Vertex function ---------------------------------------------------------

double vertex_contracted_direct(double sigma, int k, int k_trunc) {
  double s = 0.0;
  for (int k2 = -k_trunc; k2 <= k_trunc; ++k2) {
    if (k2 == 0) continue;
    const double a = k + k2;
    s += a * std::exp(-sigma * (a * a + double(k2) * k2));
  }
  return s;
}

double vertex_truncation_tail(double sigma, int k, int k_trunc) {
  const double u0 = static_cast<double>(k_trunc) - std::abs(k);
  if (u0 <= 0.0) return std::numeric_limits<double>::infinity();
  if (sigma <= 0.0) return std::numeric_limits<double>::infinity();
  const double ak = std::abs(static_cast<double>(k));
  return 2.0 * ((2.0 * ak + 1.0) * std::sqrt(kPi / (8.0 * sigma)) * std::erfc(u0 * std::sqrt(2.0 * sigma)) +
                std::exp(-2.0 * sigma * u0 * u0) / (4.0 * sigma));
}

namespace {

// Full sum over k2 in Z via Poisson summation in the shifted variable
// u = k2 + k/2, minus the k2 = 0 term.
double vertex_poisson(double sigma, int k) {
  double theta = 0.0;
  const double c = kPi * kPi / (2.0 * sigma);
  for (int m = 0;; ++m) {
    const double term = std::exp(-c * m * m);
    const double sign = (m % 2 != 0 && k % 2 != 0) ? -1.0 : 1.0;
    theta += (m == 0 ? 1.0 : 2.0) * sign * term;
    if (m > 0 && term < 1e-18) break;
  }
  const double kd = k;
  return 0.5 * kd * std::exp(-sigma * kd * kd / 2.0) * std::sqrt(kPi / (2.0 * sigma)) * theta -
         kd * std::exp(-sigma * kd * kd);
}

}  // namespace

double vertex_contracted(double sigma, int k, int k_trunc) {
  if (k == 0) return 0.0;
  const double direct = vertex_contracted_direct(sigma, k, k_trunc);
  if (vertex_truncation_tail(sigma, k, k_trunc) <= 1e-15 * std::max(1.0, std::abs(direct))) return direct;
  return vertex_poisson(sigma, k);
}

namespace {

// Bound on int_T^infty |S(sigma, k)| d sigma, term by term.
double time_tail(double t, int k, int k_trunc) {
  double s = 0.0;
  for (int k2 = -k_trunc - std::abs(k); k2 <= k_trunc + std::abs(k); ++k2) {
    if (k2 == 0 || k + k2 == 0) continue;
    const double a = k + k2;
    const double q = a * a + double(k2) * k2;
    s += std::abs(a) * std::exp(-t * q) / q;
  }
  return s;
}

}  // namespace

VertexL1 vertex_l1_norm(int k, const KernelParams& params, const QuadratureSpec& quad) {
  VertexL1 out{0.0, 0.0, params.t_trunc, {}};
  if (k == 0) return out;
  if (out.t_trunc <= 0.0) {
    out.t_trunc = 1.0;
    while (time_tail(out.t_trunc, k, params.k_trunc) >= quad.abs_tol) {
      out.t_trunc *= 2.0;
      if (out.t_trunc > 1e6) break;
    }
  }
  out.tail_bound = time_tail(out.t_trunc, k, params.k_trunc);
  if (out.tail_bound > quad.abs_tol) {
    throw QuadratureError("vertex_l1_norm: time tail " + std::to_string(out.tail_bound) + " above tolerance",
                          {});
  }
  // sigma = u^2 removes the sigma^{-1/2} singularity at the origin.
  const double limit0 = std::abs(static_cast<double>(k)) * std::sqrt(kPi / 2.0);
  auto integrand = [&](double u) {
    if (u < kRemovableRadius) return limit0;
    return 2.0 * u * std::abs(vertex_contracted(u * u, k, params.k_trunc));
  };
  out.quad = adaptive_simpson(integrand, 0.0, std::sqrt(out.t_trunc), quad);
  out.value = out.quad.value;
  return out;
}

// Zero chaos ----------------------------------------------------------------

double discrete_zero_chaos(const Scheme& scheme, int n, double t) {
  const GridSpec grid(n);
  const SymbolTable sym(scheme);
  const double eps = grid.spacing();
  double s = 0.0;
  for (int k = 1; k <= grid.max_mode(); ++k) {
    const double x = eps * k;
    const cplx g = sym.g(x);
    const double f = sym.f(x);
    const double slope = std::imag(g * sym.h_bar(x)) / x;
    const double weight = sym.h(x, -x).real() * std::norm(g) / (2.0 * f * f);
    s += slope * weight * (1.0 - std::exp(-2.0 * double(k) * k * f * t));
  }
  return -eps * s / kTwoPi;
}

// KPZ cancellation ----------------------------------------------------------

double cancellation_integrand_raw(const Mollifier& m, double k1, double k2) {
  const double k12 = k1 + k2;
  const double d = k1 * k1 + k2 * k2 + k12 * k12;
  if (d == 0.0) return 0.0;
  const double p1 = m(k1) * m(k1), p2 = m(k2) * m(k2), p12 = m(k12) * m(k12);
  double v = p1 * (p12 - p2);
  if (k12 != 0.0) v += p1 * p12 * (k2 - k1) / k12;
  return v / d;
}

double cancellation_integrand(const Mollifier& m, double k1, double k2) {
  const double k12 = k1 + k2;
  const double d = k1 * k1 + k2 * k2 + k12 * k12;
  if (d == 0.0) return 0.0;
  const double p1 = m(k1) * m(k1), p12 = m(k12) * m(k12);
  const double first = p1 * m.square_difference(k12, k2);
  double second;
  // The indicator difference is exact (0 or +-1) and has no removable
  // singularity to resolve; substituting the limit would drop a 1/k12 wedge.
  if (k12 == 0.0 || (m.kind() == MollifierKind::bump && std::abs(k12) < kRemovableRadius)) {
    const double p0 = m(0.0) * m(0.0);
    second = 0.5 * p0 * m.square_derivative(k1) * (k2 - k1);
  } else {
    second = 0.5 * p12 * m.square_difference(k1, k2) * (k2 - k1) / k12;
  }
  return (first + second) / d;
}

double cancellation_limit(const Mollifier& m, const QuadratureSpec& quad, QuadratureResult* detail) {
  constexpr double box = 2.0;
  // Inner tolerance leaves room for the outer rule on a box of width 4.
  QuadratureSpec inner = quad;
  inner.abs_tol = quad.abs_tol / (4.0 * box * 10.0);
  long evaluations = 0;
  double inner_error = 0.0;
  auto row = [&](double k1) {
    std::vector<double> pts{-box, box, -1.0, 1.0, 0.0, -k1, -k1 - 1.0, -k1 + 1.0};
    for (double& p : pts) p = std::clamp(p, -box, box);
    const QuadratureResult r =
        adaptive_simpson([&](double k2) { return cancellation_integrand(m, k1, k2); }, pts, inner);
    evaluations += r.evaluations;
    inner_error = std::max(inner_error, r.error_estimate);
    return r.value;
  };
  // Rows through k1 = +-1 carry a logarithmic singularity (the indicator's
  // corner wedge); k1 = e -+ t^2 grades the outer nodes towards it.
  QuadratureResult outer;
  const double pieces[4][2] = {{-1.0, -box}, {-1.0, 0.0}, {1.0, 0.0}, {1.0, box}};
  for (const auto& piece : pieces) {
    const double e = piece[0], dir = piece[1] > e ? 1.0 : -1.0;
    const double width = std::abs(piece[1] - e);
    QuadratureSpec part = quad;
    part.abs_tol = quad.abs_tol * width / (2.0 * box);
    const QuadratureResult r = adaptive_simpson(
        [&](double t) { return t == 0.0 ? 0.0 : 2.0 * t * row(e + dir * t * t); }, 0.0, std::sqrt(width), part);
    outer.value += r.value;
    outer.error_estimate += r.error_estimate;
    outer.evaluations += r.evaluations;
    outer.subdivisions += r.subdivisions;
  }
  outer.evaluations += evaluations;
  outer.error_estimate += 2.0 * box * inner_error;
  outer.value *= -2.0;
  outer.error_estimate *= 2.0;
  if (detail != nullptr) *detail = outer;
  return outer.value;
}

Cancellation kpz_cancellation(const Mollifier& m, int k_trunc, const QuadratureSpec& quad) {
  Cancellation c{};
  const int n = 2 * k_trunc + 1;
  std::vector<double> b(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> a(b.size(), 0.0);
  auto at = [n, k_trunc](int k1, int k2) { return static_cast<std::size_t>(k1 + k_trunc) * n + (k2 + k_trunc); };
  for (int k1 = -k_trunc; k1 <= k_trunc; ++k1) {
    for (int k2 = -k_trunc; k2 <= k_trunc; ++k2) {
      const double k12 = k1 + k2;
      const double q = k12 * k12;
      if (q == 0.0) continue;
      const double s = double(k1) * k1 + double(k2) * k2;
      a[at(k1, k2)] = 2.0 / (s + q);
      b[at(k1, k2)] = -4.0 * k12 * k2 / (q * (s + q));
    }
  }
  for (int k1 = -k_trunc; k1 <= k_trunc; ++k1) {
    for (int k2 = -k_trunc; k2 <= k_trunc; ++k2) {
      const double ai = a[at(k1, k2)];
      const double sym = 0.5 * (b[at(k1, k2)] + b[at(k2, k1)]);
      c.symmetric_zero += ai + sym;
      c.scale += std::abs(ai);
      c.first_diagram_sum += ai;
      c.second_diagram_sum += b[at(k1, k2)];
    }
  }
  c.regularized_limit = cancellation_limit(m, quad, &c.quad);
  QuadratureSpec tighter = quad;
  tighter.abs_tol = quad.abs_tol / 10.0;
  c.regularized_limit_refined = cancellation_limit(m, tighter, nullptr);
  return c;
}

}  // namespace kpzlab
