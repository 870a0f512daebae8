#include "kpzlab/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace kpzlab {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

cplx complex_normal(NoiseStream& s) {
  const double a = s.normal();
  const double b = s.normal();
  return cplx(a, b) * std::sqrt(0.5);
}

}  // namespace

NoiseStream::NoiseStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_(stream_id) {}

std::array<std::uint32_t, 4> NoiseStream::philox(std::array<std::uint32_t, 4> ctr,
                                                 std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

void NoiseStream::refill() {
  const std::array<std::uint32_t, 4> ctr{
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_),
                                         static_cast<std::uint32_t>(seed_ >> 32)};
  buf_ = philox(ctr, key);
  ++block_;
  pos_ = 0;
}

double NoiseStream::uniform() {
  if (pos_ > 2) refill();
  const std::uint64_t bits =
      (static_cast<std::uint64_t>(buf_[static_cast<std::size_t>(pos_)]) << 32) |
      buf_[static_cast<std::size_t>(pos_ + 1)];
  pos_ += 2;
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double NoiseStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = kTwoPi * u2;
  spare_normal_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

Mollifier::Mollifier(MollifierKind kind) : kind_(kind) {}

Mollifier Mollifier::by_name(const std::string& name) {
  if (name == "indicator") return Mollifier(MollifierKind::indicator);
  if (name == "bump") return Mollifier(MollifierKind::bump);
  throw std::invalid_argument("unknown mollifier: " + name);
}

std::string Mollifier::name() const {
  return kind_ == MollifierKind::indicator ? "indicator" : "bump";
}

double Mollifier::operator()(double x) const {
  const double ax = std::abs(x);
  switch (kind_) {
    case MollifierKind::indicator:
      return ax <= 1.0 ? 1.0 : 0.0;
    case MollifierKind::bump:
      if (ax >= 1.0) return 0.0;
      return std::exp(1.0 - 1.0 / (1.0 - x * x));
  }
  return 0.0;
}

double Mollifier::square_derivative(double x) const {
  if (kind_ == MollifierKind::indicator || std::abs(x) >= 1.0) return 0.0;
  const double q = 1.0 - x * x;
  const double phi = (*this)(x);
  return -4.0 * x * phi * phi / (q * q);
}

double Mollifier::square_difference(double a, double b) const {
  const double pa = (*this)(a), pb = (*this)(b);
  if (kind_ == MollifierKind::indicator || pa == 0.0 || pb == 0.0) return pa * pa - pb * pb;
  // log phi^2 = 2 - 2 / (1 - x^2); the exponent gap factors through a^2 - b^2.
  const double gap = -2.0 * (a - b) * (a + b) / ((1.0 - a * a) * (1.0 - b * b));
  if (std::abs(gap) > 0.5) return pa * pa - pb * pb;
  return pb * pb * std::expm1(gap);
}

SpectralField apply_mollifier(const Mollifier& m, const SpectralField& u, double eps_reg) {
  SpectralField out = u;
  for (int k = -u.grid().max_mode(); k <= u.grid().max_mode(); ++k) {
    out.at(k) *= m(eps_reg * k);
  }
  return out;
}

SpectralField white_increment(const GridSpec& grid, double dt, NoiseStream& stream) {
  if (!(dt > 0.0)) throw std::invalid_argument("white_increment: dt must be positive");
  SpectralField out(grid, true);
  out.at(0) = std::sqrt(kTwoPi * dt) * stream.normal();
  const double sd = std::sqrt(kPi * dt);
  for (int k = 1; k <= grid.max_mode(); ++k) {
    const double re = stream.normal();
    const double im = stream.normal();
    out.at(k) = sd * cplx(re, im);
    out.at(-k) = std::conj(out.at(k));
  }
  return out;
}

SpectralField stationary_ou_init(const GridSpec& grid, const Scheme& scheme, NoiseStream& stream) {
  const ValidationReport report = validate(scheme);
  for (const auto& c : report.checks) {
    if (c.name.rfind("laplacian", 0) == 0 && !c.passed) {
      throw std::invalid_argument("stationary_ou_init: scheme fails " + c.name + " (" + c.detail + ")");
    }
  }
  const SymbolTable sym(scheme);
  const double eps = grid.spacing();
  SpectralField out(grid, true);
  for (int k = 1; k <= grid.max_mode(); ++k) {
    const double x = eps * k;
    const double var = kPi * std::norm(sym.g(x)) / sym.f(x);
    out.at(k) = std::sqrt(var) * complex_normal(stream);
    out.at(-k) = std::conj(out.at(k));
  }
  return out;
}

LatticeField sample_white_noise_measure(const GridSpec& grid, double mean, NoiseStream& stream) {
  const double sd = std::sqrt(0.5 / grid.spacing());
  LatticeField out(grid);
  for (auto& z : out.values()) z = mean + sd * stream.normal();
  return out;
}

StepNoise draw_step_noise(const GridSpec& grid, NoiseStream& stream) {
  const auto m = static_cast<std::size_t>(grid.max_mode());
  StepNoise n{std::vector<cplx>(m + 1), std::vector<cplx>(m + 1)};
  n.primary[0] = stream.normal();
  n.secondary[0] = stream.normal();
  for (std::size_t k = 1; k <= m; ++k) {
    n.primary[k] = complex_normal(stream);
    n.secondary[k] = complex_normal(stream);
  }
  return n;
}

}  // namespace kpzlab
