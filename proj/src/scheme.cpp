#include "kpzlab/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace kpzlab {

namespace {

constexpr double kMomentTol = 1e-12;
constexpr int kPositivityGrid = 10000;

double sinc(double t) {
  if (std::abs(t) < 1e-4) {
    const double t2 = t * t;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sin(t) / t;
}

std::size_t wrap(long long l, int n) {
  long long r = l % n;
  if (r < 0) r += n;
  return static_cast<std::size_t>(r);
}

LatticeField to_lattice(const SpectralField& u) {
  LatticeField x = dft_inverse(u);
  if (u.real_flag()) {
    for (auto& z : x.values()) z = cplx(z.real(), 0.0);
  }
  return x;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

bool ValidationReport::passed(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c.passed;
  }
  throw std::out_of_range("ValidationReport: no check named " + name);
}

ValidationReport validate(const Scheme& scheme) {
  ValidationReport report;
  auto add = [&](std::string name, bool ok, const std::string& detail) {
    report.checks.push_back({std::move(name), ok, detail});
  };

  // Laplacian stencil: symmetric, zero mass, second moment 2, positive symbol.
  std::map<int, double> pi_w;
  for (const auto& a : scheme.pi) pi_w[a.offset] += a.weight;
  double asym = 0.0, mass = 0.0, second = 0.0;
  for (const auto& [y, w] : pi_w) {
    auto it = pi_w.find(-y);
    asym = std::max(asym, std::abs(w - (it == pi_w.end() ? 0.0 : it->second)));
    mass += w;
    second += static_cast<double>(y) * y * w;
  }
  std::ostringstream d;
  d << "asymmetry=" << asym;
  add("laplacian.symmetric", asym <= kMomentTol, d.str());
  d.str("");
  d << "mass=" << mass;
  add("laplacian.mass_zero", std::abs(mass) <= kMomentTol, d.str());
  d.str("");
  d << "second_moment=" << second;
  add("laplacian.second_moment", std::abs(second - 2.0) <= kMomentTol, d.str());

  const SymbolTable sym(scheme);
  double fmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kPositivityGrid; ++i) {
    const double x = -kPi + kTwoPi * i / kPositivityGrid;
    fmin = std::min(fmin, sym.f(x));
  }
  report.min_symbol = fmin;
  d.str("");
  d << "min_f=" << fmin;
  add("laplacian.positive", fmin > 0.0, d.str());

  // Derivative stencil: zero mass, unit first moment.
  double nu_mass = 0.0, nu_first = 0.0;
  for (const auto& a : scheme.nu) {
    nu_mass += a.weight;
    nu_first += a.offset * a.weight;
  }
  d.str("");
  d << "mass=" << nu_mass;
  add("derivative.mass_zero", std::abs(nu_mass) <= kMomentTol, d.str());
  d.str("");
  d << "first_moment=" << nu_first;
  add("derivative.first_moment", std::abs(nu_first - 1.0) <= kMomentTol, d.str());

  // Product measure: a symmetric probability measure.
  std::map<std::pair<int, int>, double> mu_w;
  double mu_mass = 0.0;
  bool nonneg = true;
  for (const auto& a : scheme.mu) {
    mu_w[{a.y, a.z}] += a.weight;
    mu_mass += a.weight;
  }
  double mu_asym = 0.0;
  for (const auto& [yz, w] : mu_w) {
    if (w < 0.0) nonneg = false;
    auto it = mu_w.find({yz.second, yz.first});
    mu_asym = std::max(mu_asym, std::abs(w - (it == mu_w.end() ? 0.0 : it->second)));
  }
  add("product.nonnegative", nonneg, "");
  d.str("");
  d << "mass=" << mu_mass;
  add("product.probability", std::abs(mu_mass - 1.0) <= kMomentTol, d.str());
  d.str("");
  d << "asymmetry=" << mu_asym;
  add("product.exchangeable", mu_asym <= kMomentTol, d.str());
  return report;
}

Scheme preset_standard() {
  return Scheme{"standard", {{-1, 1.0}, {0, -2.0}, {1, 1.0}}, {{0, 1.0}, {-1, -1.0}}, {{0, 0, 1.0}}};
}

Scheme preset_sasamoto_spohn(double kappa, double lambda) {
  if (!(kappa >= 0.0) || !(lambda >= 0.0) || !(kappa + lambda > 0.0)) {
    throw std::invalid_argument("preset_sasamoto_spohn: need kappa, lambda >= 0 and kappa + lambda > 0");
  }
  Scheme s = preset_standard();
  std::ostringstream name;
  name << "sasamoto_spohn(kappa=" << kappa << ",lambda=" << lambda << ")";
  s.name = name.str();
  const double norm = 2.0 * (kappa + lambda);
  s.mu = {{0, 0, kappa / norm}, {1, 1, kappa / norm}, {0, 1, lambda / norm}, {1, 0, lambda / norm}};
  return s;
}

Scheme preset_centered(int order) {
  if (order < 2 || order > 16 || order % 2 != 0) {
    throw std::invalid_argument("preset_centered: order must be even, between 2 and 16");
  }
  const int p = order / 2;
  Scheme s;
  s.name = "centered(order=" + std::to_string(order) + ")";
  const double pf2 = factorial(p) * factorial(p);
  double center = 0.0;
  for (int j = 1; j <= p; ++j) {
    const double sign = (j % 2 == 1) ? 1.0 : -1.0;
    const double base = pf2 / (factorial(p - j) * factorial(p + j));
    const double second = 2.0 * sign * base / (static_cast<double>(j) * j);
    const double first = sign * base / j;
    s.pi.push_back({j, second});
    s.pi.push_back({-j, second});
    center -= 2.0 * second;
    s.nu.push_back({j, first});
    s.nu.push_back({-j, -first});
  }
  s.pi.push_back({0, center});
  s.mu = {{0, 0, 1.0}};
  return s;
}

SymbolTable::SymbolTable(Scheme scheme) : scheme_(std::move(scheme)) {}

double SymbolTable::f(double x) const {
  // sum_y w_y (1 - cos(xy)) / x^2 = sum_y w_y (y^2 / 2) sinc^2(xy / 2)
  double s = 0.0;
  for (const auto& a : scheme_.pi) {
    const double y = a.offset;
    const double sc = sinc(0.5 * x * y);
    s += a.weight * 0.5 * y * y * sc * sc;
  }
  return s;
}

cplx SymbolTable::g(double x) const {
  // sum_y nu_y (e^{ixy} - 1) / (ix) = sum_y nu_y y e^{ixy/2} sinc(xy / 2)
  cplx s{0.0, 0.0};
  for (const auto& a : scheme_.nu) {
    const double y = a.offset;
    s += a.weight * y * sinc(0.5 * x * y) * std::polar(1.0, 0.5 * x * y);
  }
  return s;
}

cplx SymbolTable::h(double x1, double x2) const {
  cplx s{0.0, 0.0};
  for (const auto& a : scheme_.mu) s += a.weight * std::polar(1.0, x1 * a.y + x2 * a.z);
  return s;
}

double SymbolTable::im_g_hbar_slope() const {
  double mean_y = 0.0;
  for (const auto& a : scheme_.mu) mean_y += a.weight * a.y;
  double nu_second = 0.0;
  for (const auto& a : scheme_.nu) nu_second += a.weight * a.offset * a.offset;
  return mean_y + 0.5 * nu_second;
}

SpectralField apply_laplacian(const SymbolTable& s, const SpectralField& u) {
  const GridSpec& grid = u.grid();
  const double eps = grid.spacing();
  SpectralField out(grid, u.real_flag());
  for (int k = -grid.max_mode(); k <= grid.max_mode(); ++k) {
    const double kk = k;
    out.at(k) = -kk * kk * s.f(eps * kk) * u.at(k);
  }
  return out;
}

SpectralField apply_derivative(const SymbolTable& s, const SpectralField& u) {
  const GridSpec& grid = u.grid();
  const double eps = grid.spacing();
  SpectralField out(grid, u.real_flag());
  for (int k = -grid.max_mode(); k <= grid.max_mode(); ++k) {
    out.at(k) = cplx(0.0, k) * s.g(eps * k) * u.at(k);
  }
  return out;
}

SpectralField apply_bilinear(const SymbolTable& s, const SpectralField& u, const SpectralField& v) {
  if (!(u.grid() == v.grid())) throw std::invalid_argument("apply_bilinear: grid mismatch");
  const GridSpec& grid = u.grid();
  const double eps = grid.spacing();
  const int m = grid.max_mode();
  SpectralField out(grid, u.real_flag() && v.real_flag());
  for (int k = -m; k <= m; ++k) {
    cplx acc{0.0, 0.0};
    for (int l = -m; l <= m; ++l) {
      const int r = fold_mode(static_cast<long long>(k) - l, grid);
      acc += u.at(l) * v.at(r) * s.h(eps * l, eps * r);
    }
    out.at(k) = acc / kTwoPi;
  }
  return out;
}

SpectralField apply_bilinear_fast(const SymbolTable& s, const SpectralField& u,
                                  const SpectralField& v) {
  if (!(u.grid() == v.grid())) throw std::invalid_argument("apply_bilinear_fast: grid mismatch");
  const LatticeField b = bilinear_stencil(s.scheme(), to_lattice(u), to_lattice(v));
  SpectralField out = dft_forward(b);
  if (u.real_flag() && v.real_flag()) out.enforce_hermitian();
  return out;
}

LatticeField laplacian_stencil(const Scheme& s, const LatticeField& u) {
  const int n = u.grid().size();
  const double inv = 1.0 / (u.grid().spacing() * u.grid().spacing());
  LatticeField out(u.grid());
  for (int l = 0; l < n; ++l) {
    cplx acc{0.0, 0.0};
    for (const auto& a : s.pi) acc += a.weight * u[wrap(static_cast<long long>(l) + a.offset, n)];
    out[static_cast<std::size_t>(l)] = inv * acc;
  }
  return out;
}

LatticeField derivative_stencil(const Scheme& s, const LatticeField& u) {
  const int n = u.grid().size();
  const double inv = 1.0 / u.grid().spacing();
  LatticeField out(u.grid());
  for (int l = 0; l < n; ++l) {
    cplx acc{0.0, 0.0};
    for (const auto& a : s.nu) acc += a.weight * u[wrap(static_cast<long long>(l) + a.offset, n)];
    out[static_cast<std::size_t>(l)] = inv * acc;
  }
  return out;
}

LatticeField bilinear_stencil(const Scheme& s, const LatticeField& u, const LatticeField& v) {
  const int n = u.grid().size();
  LatticeField out(u.grid());
  for (int l = 0; l < n; ++l) {
    cplx acc{0.0, 0.0};
    for (const auto& a : s.mu) {
      acc += a.weight * u[wrap(static_cast<long long>(l) + a.y, n)] *
             v[wrap(static_cast<long long>(l) + a.z, n)];
    }
    out[static_cast<std::size_t>(l)] = acc;
  }
  return out;
}

cplx lattice_inner(const LatticeField& a, const LatticeField& b) {
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < a.values().size(); ++i) s += a[i] * std::conj(b[i]);
  return a.grid().spacing() * s;
}

double conservation_residual(const Scheme& s, const LatticeField& phi) {
  const LatticeField db = derivative_stencil(s, bilinear_stencil(s, phi, phi));
  double scale = 0.0;
  for (std::size_t i = 0; i < phi.values().size(); ++i) scale += std::abs(phi[i]) * std::abs(db[i]);
  scale *= phi.grid().spacing();
  if (scale == 0.0) return 0.0;
  return std::abs(lattice_inner(phi, db)) / scale;
}

}  // namespace kpzlab
