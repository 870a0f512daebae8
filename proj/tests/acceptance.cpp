// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Optional arguments restrict the run to the listed criterion numbers.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kpzlab/besov.hpp"
#include "kpzlab/constants.hpp"
#include "kpzlab/dynamics.hpp"
#include "kpzlab/experiments.hpp"

using namespace kpzlab;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

LatticeField random_lattice(const GridSpec& g, std::mt19937_64& rng, bool real) {
  std::normal_distribution<double> nd;
  LatticeField u(g);
  for (auto& z : u.values()) z = cplx(nd(rng), real ? 0.0 : nd(rng));
  return u;
}

double spectral_gap(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.coeff().size(); ++i) m = std::max(m, std::abs(a.coeff()[i] - b.coeff()[i]));
  return m;
}

double spectral_max(const SpectralField& a) {
  double m = 0.0;
  for (const cplx& c : a.coeff()) m = std::max(m, std::abs(c));
  return m;
}

Outcome correction_standard() {
  const auto t0 = Clock::now();
  const double c = correction_constant(preset_standard());
  const double secs = seconds_since(t0);
  return {std::abs(c - 0.125) <= 1e-8 && secs < 1.0, fmt("c = %.12f, %.3f s", c, secs)};
}

Outcome correction_two_site() {
  bool ok = true;
  std::string d;
  for (const auto& [k, l] : {std::pair{1.0, 0.5}, {0.0, 1.0}, {1.0, 0.0}}) {
    const double c = correction_constant(preset_sasamoto_spohn(k, l));
    ok &= std::abs(c) <= 1e-10;
    d += fmt("(%g,%g): %.2e  ", k, l, c);
  }
  return {ok, d};
}

Outcome conservation() {
  std::mt19937_64 rng(2024);
  const Scheme s = preset_sasamoto_spohn();
  double worst = 0.0;
  for (int n : {15, 31, 63}) {
    const GridSpec g(n);
    for (int t = 0; t < 100; ++t) worst = std::max(worst, conservation_residual(s, random_lattice(g, rng, true)));
  }
  return {worst <= 1e-11, fmt("max relative residual %.2e over 300 fields", worst)};
}

Outcome invariance() {
  const auto t0 = Clock::now();
  InvarianceConfig cfg;  // two-site preset, N = 63, 256 replicas, t = 1, dt = 1e-4, level 0.01
  const InvarianceReport r = invariance_experiment(cfg);
  const double secs = seconds_since(t0);
  std::string d;
  for (const auto& t : r.tests) d += fmt("%s p=%.3f  ", t.name.c_str(), t.p_value);
  d += fmt("blown=%d, %.1f s", r.blown_up_replicas, secs);
  return {r.passed() && r.conservative && secs < 300.0, d};
}

Outcome zero_chaos() {
  double prev = INFINITY, gap = 0.0;
  bool shrinking = true;
  std::string d;
  for (int n : {255, 511, 1023}) {
    const double v = discrete_zero_chaos(preset_standard(), n, 1.0);
    gap = std::abs(v - 0.125);
    shrinking &= gap < prev;
    prev = gap;
    d += fmt("N=%d: %.6f  ", n, v);
  }
  return {shrinking && gap <= 0.05 * 0.125, d};
}

Outcome renormalization() {
  bool ok = true;
  std::string d;
  for (int n : {101, 201, 401}) {
    const GridSpec g(n);
    const RenormConstant r = renormalization_constant(Mollifier(MollifierKind::indicator), g);
    const double rel = std::abs(r.lattice_sum - r.continuum) / r.continuum;
    ok &= rel <= 2.0 * g.spacing();
    d += fmt("N=%d: %.4f <= %.4f  ", n, rel, 2.0 * g.spacing());
  }
  return {ok, d};
}

Outcome cole_hopf() {
  ColeHopfConfig cfg;  // eps_reg = 1/4, N = 63, T = 0.1, dt in {4e-5, 2e-5, 1e-5}
  const ColeHopfReport r = cole_hopf_check(cfg);
  bool decreasing = true;
  for (std::size_t i = 1; i < r.sup_errors.size(); ++i) decreasing &= r.sup_errors[i] < r.sup_errors[i - 1];
  std::string d;
  for (std::size_t i = 0; i < r.dts.size(); ++i) d += fmt("dt=%g: %.3e  ", r.dts[i], r.sup_errors[i]);
  d += fmt("order %.3f", r.dt_order);
  return {decreasing && r.dt_order >= 0.4, d};
}

Outcome regularity() {
  RegularityConfig cfg;  // stationary OU, standard preset, N = 1023, 256 replicas, p = infinity
  const RegularityFit f = regularity_experiment(cfg);
  return {f.alpha_hat >= -0.65 && f.alpha_hat <= -0.40,
          fmt("alpha_hat = %.4f (r^2 %.4f, blocks %d..%d)", f.alpha_hat, f.r_squared, f.j_lo, f.j_hi)};
}

Outcome vertex() {
  double prev = INFINITY;
  bool ok = true;
  std::string d;
  for (int k : {8, 16, 32, 64, 128}) {
    const double r = vertex_l1_norm(k).value / std::pow(k, 0.25);
    ok &= r <= prev;
    prev = r;
    d += fmt("%d: %.4f  ", k, r);
  }
  return {ok, d};
}

Outcome cancellation() {
  const Cancellation c = kpz_cancellation(Mollifier(MollifierKind::indicator), 64);
  const double change = std::abs(c.regularized_limit_refined - c.regularized_limit) / std::abs(c.regularized_limit_refined);
  const bool ok = std::abs(c.symmetric_zero) <= 1e-12 * c.scale && std::isfinite(c.regularized_limit) && change <= 0.01;
  return {ok, fmt("symmetric %.2e (scale %.2f), limit %.8f, refined %.8f", c.symmetric_zero, c.scale,
                  c.regularized_limit, c.regularized_limit_refined)};
}

Outcome feynman_kac() {
  FeynmanKacConfig cfg;
  const FeynmanKacReport r = feynman_kac_experiment(cfg);
  return {r.matches && r.jensen.holds, fmt("MC %.6f +- %.2e, reference %.6f, z = %.2f, Jensen %s",
                                           r.estimate.mean, r.estimate.std_err, r.reference, r.z_score,
                                           r.jensen.holds ? "holds" : "violated")};
}

Outcome exactness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(7);
  double dft = 0.0, parseval = 0.0, ops = 0.0, para = 0.0;
  bool fold = true;
  for (int n : {15, 63, 255, 1023}) {
    const GridSpec g(n);
    const LatticeField u = random_lattice(g, rng, false);
    const SpectralField f = dft_forward(u);
    const LatticeField back = dft_inverse(f);
    for (std::size_t i = 0; i < u.values().size(); ++i) dft = std::max(dft, std::abs(back[i] - u[i]));
    double s = 0.0;
    for (const cplx& c : f.coeff()) s += std::norm(c);
    parseval = std::max(parseval, std::abs(lattice_l2_squared(u) - s / kTwoPi) / (s / kTwoPi));
    for (long long k = -3LL * n; k <= 3LL * n; ++k) {
      const int m = fold_mode(k, g);
      fold &= g.contains(m) && m == fold_mode(k + n, g) && (k - m) % n == 0;
    }
  }
  for (const Scheme& s : {preset_standard(), preset_sasamoto_spohn(), preset_centered(8)}) {
    const SymbolTable t(s);
    const GridSpec g(31);
    const LatticeField u = random_lattice(g, rng, true), v = random_lattice(g, rng, true);
    const SpectralField uh = dft_forward(u), vh = dft_forward(v);
    const double eps = g.spacing();
    ops = std::max(ops, spectral_gap(apply_laplacian(t, uh), dft_forward(laplacian_stencil(s, u))) * eps * eps /
                            spectral_max(uh));
    ops = std::max(ops, spectral_gap(apply_derivative(t, uh), dft_forward(derivative_stencil(s, u))) * eps /
                            spectral_max(uh));
    const SpectralField b = dft_forward(bilinear_stencil(s, u, v));
    ops = std::max(ops, spectral_gap(apply_bilinear(t, uh, vh), b) / spectral_max(b));
    ops = std::max(ops, spectral_gap(apply_bilinear_fast(t, uh, vh), b) / spectral_max(b));
  }
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 10; ++trial) {
    ModeMap f, g;
    for (int k = -40; k <= 40; ++k) f[k] = cplx(nd(rng), nd(rng));
    for (int k = -90; k <= 90; ++k) g[k] = cplx(nd(rng), nd(rng));
    const Paraproducts pp = paraproducts(f, g);
    const ModeMap fg = multiply(f, g);
    double scale = 0.0, gap = 0.0;
    for (const auto& [k, c] : fg) {
      scale = std::max(scale, std::abs(c));
      auto get = [k = k](const ModeMap& m) {
        const auto it = m.find(k);
        return it == m.end() ? cplx{} : it->second;
      };
      gap = std::max(gap, std::abs(get(pp.less) + get(pp.greater) + get(pp.resonant) - c));
    }
    para = std::max(para, gap / scale);
  }
  const double secs = seconds_since(t0);
  const bool ok = dft <= 1e-12 && parseval <= 1e-12 && fold && ops <= 1e-10 && para <= 1e-11 && secs < 30.0;
  return {ok, fmt("roundtrip %.1e, Parseval %.1e, fold %s, operators %.1e, paraproducts %.1e, %.2f s", dft,
                  parseval, fold ? "ok" : "broken", ops, para, secs)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"correction constant, standard preset", correction_standard},
      {"correction constant, two-site family", correction_two_site},
      {"conservation identity", conservation},
      {"white-noise invariance", invariance},
      {"zero-chaos convergence", zero_chaos},
      {"renormalization constant", renormalization},
      {"Cole-Hopf self-consistency", cole_hopf},
      {"regularity exponent of the OU ensemble", regularity},
      {"vertex bound", vertex},
      {"KPZ cancellation", cancellation},
      {"Feynman-Kac", feynman_kac},
      {"exactness suite", exactness},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.passed) ++failed;
    std::printf("[%s] %2d. %s: %s\n", o.passed ? "PASS" : "FAIL", id, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
