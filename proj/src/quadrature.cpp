#include "kpzlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kpzlab {

namespace {

struct Panel {
  double a, b;
  double fa, fm, fb;
  double whole;
  int depth;
};

constexpr int kMaxDepth = 60;

}  // namespace

QuadratureResult adaptive_simpson(const Integrand& f, double a, double b, const QuadratureSpec& spec) {
  QuadratureResult res;
  if (a == b) return res;
  const double length = std::abs(b - a);
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  res.evaluations = 3;
  std::vector<Panel> stack;
  stack.push_back({a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), 0});

  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    const double lm = 0.5 * (p.a + m), rm = 0.5 * (m + p.b);
    const double flm = f(lm), frm = f(rm);
    res.evaluations += 2;
    const double left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
    const double right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
    const double delta = left + right - p.whole;
    const double local_tol = spec.abs_tol * std::abs(p.b - p.a) / length;
    if (std::abs(delta) <= 15.0 * local_tol || p.depth >= kMaxDepth) {
      res.value += left + right + delta / 15.0;
      res.error_estimate += std::abs(delta) / 15.0;
      ++res.subdivisions;
      if (res.subdivisions > spec.max_subdivisions) {
        throw QuadratureError("adaptive_simpson: exceeded " + std::to_string(spec.max_subdivisions) +
                                  " subdivisions",
                              res);
      }
      continue;
    }
    if (static_cast<long>(stack.size()) + res.subdivisions > spec.max_subdivisions) {
      throw QuadratureError("adaptive_simpson: exceeded " + std::to_string(spec.max_subdivisions) +
                                " subdivisions",
                            res);
    }
    stack.push_back({m, p.b, p.fm, frm, p.fb, right, p.depth + 1});
    stack.push_back({p.a, m, p.fa, flm, p.fm, left, p.depth + 1});
  }
  return res;
}

QuadratureResult adaptive_simpson(const Integrand& f, std::vector<double> points,
                                  const QuadratureSpec& spec) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  QuadratureResult total;
  if (points.size() < 2) return total;
  const double length = points.back() - points.front();
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    QuadratureSpec piece = spec;
    piece.abs_tol = spec.abs_tol * (points[i + 1] - points[i]) / length;
    piece.max_subdivisions = spec.max_subdivisions - static_cast<int>(total.subdivisions);
    const QuadratureResult r = adaptive_simpson(f, points[i], points[i + 1], piece);
    total.value += r.value;
    total.error_estimate += r.error_estimate;
    total.evaluations += r.evaluations;
    total.subdivisions += r.subdivisions;
  }
  return total;
}

}  // namespace kpzlab
