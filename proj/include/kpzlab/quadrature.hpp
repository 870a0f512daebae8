#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace kpzlab {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  /// Upper bound on the number of accepted subintervals.
  int max_subdivisions = 1 << 20;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
  long subdivisions = 0;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, QuadratureResult partial)
      : std::runtime_error(what), partial_(partial) {}
  const QuadratureResult& partial() const { return partial_; }

 private:
  QuadratureResult partial_;
};

using Integrand = std::function<double(double)>;

/// Adaptive composite Simpson with Richardson correction. The tolerance is
/// distributed proportionally to subinterval length. Throws QuadratureError
/// (carrying the partial estimate) when max_subdivisions is exceeded.
QuadratureResult adaptive_simpson(const Integrand& f, double a, double b, const QuadratureSpec& spec);

/// Same over consecutive pieces [p0, p1], [p1, p2], ... (sorted, deduplicated).
QuadratureResult adaptive_simpson(const Integrand& f, std::vector<double> points,
                                  const QuadratureSpec& spec);

}  // namespace kpzlab
