#include "kpzlab/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace kpzlab {

namespace {

// FFTW planning is not thread-safe; execution on fresh arrays is.
struct PlanPair {
  fftw_plan forward;
  fftw_plan backward;
};

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  PlanPair get(int n) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    auto* in = fftw_alloc_complex(static_cast<std::size_t>(n));
    auto* out = fftw_alloc_complex(static_cast<std::size_t>(n));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair p{fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, flags),
               fftw_plan_dft_1d(n, in, out, FFTW_BACKWARD, flags)};
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(n, p);
    return p;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }

  std::mutex mutex_;
  std::unordered_map<int, PlanPair> plans_;
};

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

GridSpec::GridSpec(int n) : n_(n), eps_(0.0) {
  if (n <= 0 || n % 2 == 0) {
    throw std::invalid_argument("GridSpec: N must be odd and positive, got " + std::to_string(n));
  }
  eps_ = kTwoPi / n;
}

int fold_mode(long long k, const GridSpec& grid) {
  const long long n = grid.size();
  long long r = k % n;
  if (r < 0) r += n;
  if (r > grid.max_mode()) r -= n;
  return static_cast<int>(r);
}

LatticeField::LatticeField(GridSpec grid)
    : grid_(grid), values_(static_cast<std::size_t>(grid.size())) {}

LatticeField::LatticeField(GridSpec grid, std::vector<cplx> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(grid_.size())) {
    throw std::invalid_argument("LatticeField: expected N samples");
  }
}

LatticeField LatticeField::from_real(GridSpec grid, std::span<const double> values) {
  std::vector<cplx> v(values.begin(), values.end());
  return LatticeField(grid, std::move(v));
}

std::vector<double> LatticeField::real_part() const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [](cplx z) { return z.real(); });
  return out;
}

double LatticeField::max_abs() const {
  double m = 0.0;
  for (const auto& z : values_) m = std::max(m, std::abs(z));
  return m;
}

bool LatticeField::is_real() const {
  return std::all_of(values_.begin(), values_.end(), [](cplx z) { return z.imag() == 0.0; });
}

SpectralField::SpectralField(GridSpec grid, bool real_flag)
    : grid_(grid), coeff_(static_cast<std::size_t>(grid.size())), real_(real_flag) {}

SpectralField::SpectralField(GridSpec grid, std::vector<cplx> coeff, bool real_flag)
    : grid_(grid), coeff_(std::move(coeff)), real_(real_flag) {
  if (coeff_.size() != static_cast<std::size_t>(grid_.size())) {
    throw std::invalid_argument("SpectralField: expected N coefficients");
  }
}

void SpectralField::enforce_hermitian() {
  const int m = grid_.max_mode();
  at(0) = cplx(at(0).real(), 0.0);
  for (int k = 1; k <= m; ++k) {
    const cplx avg = 0.5 * (at(k) + std::conj(at(-k)));
    at(k) = avg;
    at(-k) = std::conj(avg);
  }
  real_ = true;
}

double SpectralField::hermitian_defect() const {
  double d = 0.0;
  for (int k = 0; k <= grid_.max_mode(); ++k) {
    d = std::max(d, std::abs(at(-k) - std::conj(at(k))));
  }
  return d;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  for (std::size_t i = 0; i < coeff_.size(); ++i) coeff_[i] += o.coeff_[i];
  real_ = real_ && o.real_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  for (std::size_t i = 0; i < coeff_.size(); ++i) coeff_[i] -= o.coeff_[i];
  real_ = real_ && o.real_;
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeff_) c *= s;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

SpectralField dft_forward(const LatticeField& u) {
  const GridSpec& grid = u.grid();
  const int n = grid.size();
  std::vector<cplx> in(u.values().begin(), u.values().end());
  std::vector<cplx> out(static_cast<std::size_t>(n));
  fftw_execute_dft(PlanCache::instance().get(n).forward, as_fftw(in.data()), as_fftw(out.data()));

  SpectralField f(grid, u.is_real());
  const double eps = grid.spacing();
  for (int k = -grid.max_mode(); k <= grid.max_mode(); ++k) {
    const int j = k < 0 ? k + n : k;
    f.at(k) = eps * out[static_cast<std::size_t>(j)];
  }
  if (f.real_flag()) f.enforce_hermitian();
  return f;
}

LatticeField dft_inverse(const SpectralField& f) {
  const GridSpec& grid = f.grid();
  const int n = grid.size();
  std::vector<cplx> in(static_cast<std::size_t>(n));
  for (int k = -grid.max_mode(); k <= grid.max_mode(); ++k) {
    const int j = k < 0 ? k + n : k;
    in[static_cast<std::size_t>(j)] = f.at(k);
  }
  std::vector<cplx> out(static_cast<std::size_t>(n));
  fftw_execute_dft(PlanCache::instance().get(n).backward, as_fftw(in.data()), as_fftw(out.data()));
  const double scale = 1.0 / kTwoPi;
  for (auto& z : out) z *= scale;
  return LatticeField(grid, std::move(out));
}

cplx extend(const SpectralField& f, double x) {
  const int m = f.grid().max_mode();
  cplx sum{0.0, 0.0};
  for (int k = -m; k <= m; ++k) {
    sum += f.at(k) * std::polar(1.0, static_cast<double>(k) * x);
  }
  return sum / kTwoPi;
}

SpectralField periodize(const ModeMap& coeff, const GridSpec& grid) {
  SpectralField out(grid, false);
  for (const auto& [k, c] : coeff) out.at(fold_mode(k, grid)) += c;
  return out;
}

ModeMap cutoff(const ModeMap& coeff, const GridSpec& grid) {
  ModeMap out;
  for (const auto& [k, c] : coeff) {
    if (grid.contains(k)) out.emplace(k, c);
  }
  return out;
}

double lattice_l2_squared(const LatticeField& u) {
  double s = 0.0;
  for (const auto& z : u.values()) s += std::norm(z);
  return u.grid().spacing() * s;
}

}  // namespace kpzlab
