#include "kpzlab/dynamics.hpp"

#include "kpzlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace kpzlab {

namespace {

LatticeField real_lattice(const SpectralField& u) {
  LatticeField x = dft_inverse(u);
  if (u.real_flag()) {
    for (auto& z : x.values()) z = cplx(z.real(), 0.0);
  }
  return x;
}

double min_real(const LatticeField& u) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& z : u.values()) m = std::min(m, z.real());
  return m;
}

bool all_finite(const LatticeField& u) {
  return std::all_of(u.values().begin(), u.values().end(),
                     [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

}  // namespace

std::string to_string(Equation e) {
  switch (e) {
    case Equation::burgers: return "burgers";
    case Equation::kpz: return "kpz";
    case Equation::she: return "she";
  }
  return "unknown";
}

Equation equation_from_string(const std::string& s) {
  if (s == "burgers") return Equation::burgers;
  if (s == "kpz") return Equation::kpz;
  if (s == "she") return Equation::she;
  throw ConfigError("unknown equation: " + s);
}

double SimConfig::effective_blowup_threshold() const {
  if (blowup_threshold > 0.0) return blowup_threshold;
  return 1e6 / std::sqrt(grid.spacing());
}

void check_config(const SimConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(cfg.t_end >= 0.0)) throw ConfigError("t_end must be nonnegative");
  if (cfg.blowup_threshold < 0.0) throw ConfigError("blowup_threshold must be positive");
  const double eps = cfg.grid.spacing();
  if (cfg.nonlinear && cfg.dt > eps * eps) {
    throw ConfigError("dt = " + std::to_string(cfg.dt) + " exceeds the stability guard eps^2 = " +
                      std::to_string(eps * eps));
  }
  if (cfg.mollifier && !(cfg.eps_reg > 0.0)) {
    throw ConfigError("a mollifier needs eps_reg > 0");
  }
  if (cfg.snapshot_stride < 0) throw ConfigError("snapshot_stride must be nonnegative");
}

Integrator::Integrator(SimConfig cfg) : cfg_(std::move(cfg)), symbols_(cfg_.scheme) {
  check_config(cfg_);
  const GridSpec& grid = cfg_.grid;
  const auto n = static_cast<std::size_t>(grid.size());
  decay_.resize(n);
  phi1dt_.resize(n);
  ikg_.resize(n);
  conv_a_.resize(n);
  conv_b_.resize(n);
  moll_.resize(n);
  const double eps = grid.spacing();
  const double dt = cfg_.dt;
  for (int k = -grid.max_mode(); k <= grid.max_mode(); ++k) {
    const std::size_t i = grid.index(k);
    const double kk = k;
    const double lambda = kk * kk * symbols_.f(eps * kk);
    // v = int_0^dt e^{-2 lambda s} ds, c = int_0^dt e^{-lambda s} ds
    double v = dt, c = dt;
    if (lambda * dt > 0.0) {
      v = -std::expm1(-2.0 * lambda * dt) / (2.0 * lambda);
      c = -std::expm1(-lambda * dt) / lambda;
    }
    decay_[i] = std::exp(-lambda * dt);
    phi1dt_[i] = c;
    ikg_[i] = cplx(0.0, kk) * symbols_.g(eps * kk);
    conv_a_[i] = c / std::sqrt(dt);
    conv_b_[i] = std::sqrt(std::max(0.0, v - conv_a_[i] * conv_a_[i]));
    double m = cfg_.noise_amplitude;
    if (cfg_.mollifier) m *= (*cfg_.mollifier)(cfg_.eps_reg * kk);
    moll_[i] = m;
  }
}

cplx Integrator::stochastic_convolution(int k, const StepNoise& noise) const {
  const std::size_t i = cfg_.grid.index(k);
  const auto a = static_cast<std::size_t>(std::abs(k));
  cplx z1 = noise.primary[a], z2 = noise.secondary[a];
  if (k < 0) {
    z1 = std::conj(z1);
    z2 = std::conj(z2);
  }
  return std::sqrt(kTwoPi) * moll_[i] * (conv_a_[i] * z1 + conv_b_[i] * z2);
}

cplx Integrator::plain_increment(int k, const StepNoise& noise) const {
  const std::size_t i = cfg_.grid.index(k);
  cplx z1 = noise.primary[static_cast<std::size_t>(std::abs(k))];
  if (k < 0) z1 = std::conj(z1);
  return std::sqrt(kTwoPi * cfg_.dt) * moll_[i] * z1;
}

SpectralField Integrator::step_burgers(const SpectralField& u, const StepNoise& noise) const {
  const GridSpec& grid = cfg_.grid;
  SpectralField nl(grid, true);
  if (cfg_.nonlinear) {
    const LatticeField x = real_lattice(u);
    nl = dft_forward(bilinear_stencil(cfg_.scheme, x, x));
  }
  SpectralField out(grid, u.real_flag());
  for (int k = -grid.max_mode(); k <= grid.max_mode(); ++k) {
    const std::size_t i = grid.index(k);
    out.at(k) = decay_[i] * u.at(k) +
                ikg_[i] * (phi1dt_[i] * nl.at(k) + stochastic_convolution(k, noise));
  }
  return out;
}

SpectralField Integrator::step_kpz(const SpectralField& h, const StepNoise& noise) const {
  const GridSpec& grid = cfg_.grid;
  SpectralField nl(grid, true);
  if (cfg_.nonlinear) {
    const LatticeField dh = real_lattice(apply_derivative(symbols_, h));
    nl = dft_forward(bilinear_stencil(cfg_.scheme, dh, dh));
  }
  // The constant c on the lattice has coefficient 2 pi c at k = 0.
  nl.at(0) -= kTwoPi * cfg_.renorm_constant;
  SpectralField out(grid, h.real_flag());
  for (int k = -grid.max_mode(); k <= grid.max_mode(); ++k) {
    const std::size_t i = grid.index(k);
    out.at(k) = decay_[i] * h.at(k) + phi1dt_[i] * nl.at(k) + stochastic_convolution(k, noise);
  }
  return out;
}

LatticeField Integrator::noise_increment(const StepNoise& noise) const {
  const GridSpec& grid = cfg_.grid;
  SpectralField db(grid, true);
  for (int k = -grid.max_mode(); k <= grid.max_mode(); ++k) db.at(k) = plain_increment(k, noise);
  return real_lattice(db);
}

SpectralField Integrator::step_she(const SpectralField& w, const StepNoise& noise) const {
  const GridSpec& grid = cfg_.grid;
  LatticeField x = real_lattice(w);
  const LatticeField db = noise_increment(noise);
  for (std::size_t l = 0; l < x.values().size(); ++l) x[l] += x[l] * db[l];
  SpectralField out = dft_forward(x);
  for (int k = -grid.max_mode(); k <= grid.max_mode(); ++k) out.at(k) *= decay_[grid.index(k)];
  return out;
}

SpectralField Integrator::step(const SpectralField& state, const StepNoise& noise) const {
  switch (cfg_.equation) {
    case Equation::burgers: return step_burgers(state, noise);
    case Equation::kpz: return step_kpz(state, noise);
    case Equation::she: return step_she(state, noise);
  }
  throw std::logic_error("unreachable equation");
}

SpectralField step_burgers(const SpectralField& state, const SimConfig& cfg, const StepNoise& noise) {
  return Integrator(cfg).step_burgers(state, noise);
}

SpectralField step_kpz(const SpectralField& state, const SimConfig& cfg, const StepNoise& noise) {
  return Integrator(cfg).step_kpz(state, noise);
}

SpectralField step_she(const SpectralField& state, const SimConfig& cfg, const StepNoise& noise) {
  return Integrator(cfg).step_she(state, noise);
}

Trajectory run(const SimConfig& cfg, const SpectralField& initial) {
  const Integrator integ(cfg);
  NoiseStream stream(cfg.seed, cfg.stream);
  const double threshold = cfg.effective_blowup_threshold();
  const auto n_steps = static_cast<long long>(std::llround(cfg.t_end / cfg.dt));

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(initial);
  const bool track_sign = cfg.equation == Equation::she && min_real(real_lattice(initial)) > 0.0;

  SpectralField state = initial;
  bool final_recorded = true;
  for (long long s = 1; s <= n_steps; ++s) {
    state = integ.step(state, draw_step_noise(cfg.grid, stream));
    const double t = static_cast<double>(s) * cfg.dt;
    const LatticeField x = real_lattice(state);
    if (!all_finite(x) || x.max_abs() >= threshold) {
      traj.blown_up_at = t;
      return traj;
    }
    if (track_sign && min_real(x) < 0.0) traj.lost_positivity = true;
    final_recorded = false;
    if (cfg.snapshot_stride > 0 && s % cfg.snapshot_stride == 0) {
      traj.times.push_back(t);
      traj.states.push_back(state);
      final_recorded = true;
    }
  }
  if (!final_recorded) {
    traj.times.push_back(static_cast<double>(n_steps) * cfg.dt);
    traj.states.push_back(state);
  }
  return traj;
}

double lattice_renorm_sum(const Mollifier& m, double eps_reg, const GridSpec& grid) {
  double s = 0.0;
  for (int k = -grid.max_mode(); k <= grid.max_mode(); ++k) {
    const double p = m(eps_reg * k);
    s += p * p;
  }
  return s / (4.0 * kPi);
}

double cole_hopf_sup_error(const ColeHopfConfig& cfg, double dt, std::uint64_t replica) {
  SimConfig base;
  base.grid = cfg.grid;
  base.scheme = cfg.scheme;
  base.dt = dt;
  base.t_end = cfg.t_end;
  base.mollifier = cfg.mollifier;
  base.eps_reg = cfg.eps_reg;
  base.noise_amplitude = cfg.noise_amplitude;
  base.renorm_constant = cfg.noise_amplitude * cfg.noise_amplitude *
                         lattice_renorm_sum(cfg.mollifier, cfg.eps_reg, cfg.grid);

  SimConfig kpz_cfg = base;
  kpz_cfg.equation = Equation::kpz;
  SimConfig she_cfg = base;
  she_cfg.equation = Equation::she;
  const Integrator kpz(kpz_cfg);
  const Integrator she(she_cfg);

  const GridSpec& grid = cfg.grid;
  std::vector<double> h0(static_cast<std::size_t>(grid.size()));
  std::vector<double> w0(h0.size());
  for (int l = 0; l < grid.size(); ++l) {
    const double x = grid.site(l);
    h0[static_cast<std::size_t>(l)] = cfg.initial_amplitude * (std::sin(x) + 0.5 * std::cos(2.0 * x));
    w0[static_cast<std::size_t>(l)] = std::exp(h0[static_cast<std::size_t>(l)]);
  }
  SpectralField h = dft_forward(LatticeField::from_real(grid, h0));
  SpectralField w = dft_forward(LatticeField::from_real(grid, w0));

  NoiseStream stream(cfg.seed, replica);
  const auto n_steps = static_cast<long long>(std::llround(cfg.t_end / dt));
  double sup = 0.0;
  for (long long s = 0; s < n_steps; ++s) {
    const StepNoise noise = draw_step_noise(grid, stream);
    h = kpz.step_kpz(h, noise);
    w = she.step_she(w, noise);
    const LatticeField hx = real_lattice(h);
    const LatticeField wx = real_lattice(w);
    for (std::size_t l = 0; l < hx.values().size(); ++l) {
      sup = std::max(sup, std::abs(std::exp(hx[l].real()) - wx[l].real()));
    }
    if (!std::isfinite(sup)) return std::numeric_limits<double>::infinity();
  }
  return sup;
}

ColeHopfReport cole_hopf_check(const ColeHopfConfig& cfg) {
  if (cfg.dts.size() < 2) throw ConfigError("cole_hopf_check needs at least two time steps");
  if (cfg.replicas < 1) throw ConfigError("cole_hopf_check needs at least one replica");
  ColeHopfReport rep;
  rep.dts = cfg.dts;
  rep.renorm_constant = cfg.noise_amplitude * cfg.noise_amplitude *
                        lattice_renorm_sum(cfg.mollifier, cfg.eps_reg, cfg.grid);
  for (double dt : cfg.dts) {
    std::vector<double> errs(static_cast<std::size_t>(cfg.replicas));
    parallel_for(cfg.replicas, [&](int r) {
      errs[static_cast<std::size_t>(r)] = cole_hopf_sup_error(cfg, dt, static_cast<std::uint64_t>(r));
    });
    rep.sup_errors.push_back(std::accumulate(errs.begin(), errs.end(), 0.0) / cfg.replicas);
  }
  // Least-squares slope of log(err) against log(dt).
  const std::size_t n = rep.dts.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(rep.dts[i]);
    my += std::log(rep.sup_errors[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(rep.dts[i]) - mx;
    sxy += dx * (std::log(rep.sup_errors[i]) - my);
    sxx += dx * dx;
  }
  rep.dt_order = sxy / sxx;
  const auto smallest = std::min_element(rep.dts.begin(), rep.dts.end()) - rep.dts.begin();
  rep.sup_error = rep.sup_errors[static_cast<std::size_t>(smallest)];
  return rep;
}

FeynmanKacEstimate feynman_kac_mc(const SpaceTimeFunction& theta, const SpaceFunction& h_bar,
                                  double t_end, double x, int n_paths, NoiseStream& stream,
                                  int steps) {
  if (n_paths < 100) throw std::invalid_argument("feynman_kac_mc: need at least 100 paths");
  if (steps < 1 || !(t_end > 0.0)) throw std::invalid_argument("feynman_kac_mc: bad time grid");
  const double ds = t_end / steps;
  const double sd = std::sqrt(2.0 * ds);
  std::vector<double> ys(static_cast<std::size_t>(n_paths));
  for (auto& y : ys) {
    double b = 0.0;
    double prev = theta(t_end, x);
    double integral = 0.0;
    for (int j = 1; j <= steps; ++j) {
      b += sd * stream.normal();
      const double cur = theta(t_end - j * ds, x + b);
      integral += 0.5 * ds * (prev + cur);
      prev = cur;
    }
    y = h_bar(x + b) + integral;
  }
  const double ymax = *std::max_element(ys.begin(), ys.end());
  double sum_e = 0.0, sum_e2 = 0.0, sum_y = 0.0, sum_y2 = 0.0;
  for (double y : ys) {
    const double e = std::exp(y - ymax);
    sum_e += e;
    sum_e2 += e * e;
    sum_y += y;
    sum_y2 += y * y;
  }
  const double n = n_paths;
  const double mean_e = sum_e / n;
  const double var_e = std::max(0.0, (sum_e2 - n * mean_e * mean_e) / (n - 1.0));
  const double mean_y = sum_y / n;
  const double var_y = std::max(0.0, (sum_y2 - n * mean_y * mean_y) / (n - 1.0));
  FeynmanKacEstimate est;
  est.mean = ymax + std::log(mean_e);
  est.std_err = std::sqrt(var_e / n) / mean_e;
  est.jensen_mean = mean_y;
  est.jensen_std_err = std::sqrt(var_y / n);
  est.n_paths = n_paths;
  return est;
}

JensenCheck variational_lower_bound_check(const FeynmanKacEstimate& est) {
  const double combined = std::hypot(est.std_err, est.jensen_std_err);
  JensenCheck c;
  c.lower = est.jensen_mean;
  c.upper = est.mean;
  c.slack = est.mean + 3.0 * combined - est.jensen_mean;
  c.holds = c.slack >= 0.0;
  return c;
}

LatticeField kpz_spectral_deterministic(const SpaceTimeFunction& theta, const SpaceFunction& h0,
                                        double t_end, int n, double dt) {
  const GridSpec grid(n);
  const int m = grid.max_mode();
  const double kcut = n / 3.0;

  auto nonlinear = [&](const SpectralField& v, double t) {
    SpectralField dv(grid, true);
    for (int k = -m; k <= m; ++k) dv.at(k) = cplx(0.0, k) * v.at(k);
    LatticeField x = real_lattice(dv);
    for (int l = 0; l < n; ++l) {
      const double d = x[static_cast<std::size_t>(l)].real();
      x[static_cast<std::size_t>(l)] = d * d + theta(t, grid.site(l));
    }
    SpectralField out = dft_forward(x);
    for (int k = -m; k <= m; ++k) {
      if (std::abs(k) > kcut) out.at(k) = 0.0;
    }
    return out;
  };

  std::vector<double> init(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) init[static_cast<std::size_t>(l)] = h0(grid.site(l));
  SpectralField v = dft_forward(LatticeField::from_real(grid, init));

  const auto n_steps = static_cast<long long>(std::llround(t_end / dt));
  std::vector<double> e_half(static_cast<std::size_t>(n)), e_full(static_cast<std::size_t>(n));
  for (int k = -m; k <= m; ++k) {
    e_half[grid.index(k)] = std::exp(-0.5 * dt * k * k);
    e_full[grid.index(k)] = std::exp(-dt * k * k);
  }
  auto scale = [&](const SpectralField& a, const std::vector<double>& e) {
    SpectralField out = a;
    for (int k = -m; k <= m; ++k) out.at(k) *= e[grid.index(k)];
    return out;
  };

  double t = 0.0;
  for (long long s = 0; s < n_steps; ++s) {
    const SpectralField k1 = dt * nonlinear(v, t);
    const SpectralField k2 = dt * nonlinear(scale(v + 0.5 * k1, e_half), t + 0.5 * dt);
    const SpectralField k3 = dt * nonlinear(scale(v, e_half) + 0.5 * k2, t + 0.5 * dt);
    const SpectralField k4 = dt * nonlinear(scale(v, e_full) + scale(k3, e_half), t + dt);
    SpectralField next = scale(v, e_full);
    next += (1.0 / 6.0) * (scale(k1, e_full) + 2.0 * scale(k2 + k3, e_half) + k4);
    v = next;
    t += dt;
  }
  return real_lattice(v);
}

}  // namespace kpzlab
