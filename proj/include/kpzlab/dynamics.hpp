#pragma once

// Time integration of the lattice Burgers / KPZ / multiplicative heat
// equations, the coupled Cole-Hopf comparison, and Feynman-Kac Monte Carlo.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kpzlab/grid.hpp"
#include "kpzlab/noise.hpp"
#include "kpzlab/scheme.hpp"

namespace kpzlab {

enum class Equation { burgers, kpz, she };

std::string to_string(Equation e);
Equation equation_from_string(const std::string& s);

/// Raised for configurations rejected before any computation.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SimConfig {
  GridSpec grid{63};
  Scheme scheme = preset_standard();
  double dt = 1e-4;
  double t_end = 1.0;
  Equation equation = Equation::burgers;
  /// c_N subtracted on mode 0 of the KPZ nonlinearity.
  double renorm_constant = 0.0;
  /// L-infinity level that ends the run; 0 selects 1e6 * eps^{-1/2}.
  double blowup_threshold = 0.0;
  std::optional<Mollifier> mollifier;
  double eps_reg = 0.0;
  double noise_amplitude = 1.0;
  bool nonlinear = true;
  /// Record every n-th step; 0 records only the initial and final states.
  int snapshot_stride = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  double effective_blowup_threshold() const;
};

/// Throws ConfigError on dt <= 0, t_end < 0, a nonlinear run with dt > eps^2,
/// a negative blow-up threshold, or a mollifier without eps_reg > 0.
void check_config(const SimConfig& cfg);

struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> states;
  std::optional<double> blown_up_at;
  /// Set when a run of the heat equation started positive and went negative.
  bool lost_positivity = false;
};

/// Exponential-Euler integrator with exact per-mode stochastic convolution.
/// All per-mode factors are precomputed from the configuration.
class Integrator {
 public:
  explicit Integrator(SimConfig cfg);

  const SimConfig& config() const { return cfg_; }

  SpectralField step_burgers(const SpectralField& u, const StepNoise& noise) const;
  SpectralField step_kpz(const SpectralField& h, const StepNoise& noise) const;
  SpectralField step_she(const SpectralField& w, const StepNoise& noise) const;
  /// Dispatches on cfg.equation.
  SpectralField step(const SpectralField& state, const StepNoise& noise) const;

  /// Physical-space noise increment dB seen by the heat equation for this step.
  LatticeField noise_increment(const StepNoise& noise) const;

 private:
  cplx stochastic_convolution(int k, const StepNoise& noise) const;
  cplx plain_increment(int k, const StepNoise& noise) const;

  SimConfig cfg_;
  SymbolTable symbols_;
  std::vector<double> decay_;   // e^{-lambda dt}
  std::vector<double> phi1dt_;  // dt * (1 - e^{-z}) / z, z = lambda dt
  std::vector<cplx> ikg_;       // i k g(eps k)
  std::vector<double> conv_a_;  // coefficient of the primary variate in eta
  std::vector<double> conv_b_;  // coefficient of the secondary variate in eta
  std::vector<double> moll_;    // phi(eps_reg k) * noise_amplitude
};

// Single-step conveniences (construct an Integrator per call).
SpectralField step_burgers(const SpectralField& state, const SimConfig& cfg, const StepNoise& noise);
SpectralField step_kpz(const SpectralField& state, const SimConfig& cfg, const StepNoise& noise);
SpectralField step_she(const SpectralField& state, const SimConfig& cfg, const StepNoise& noise);

/// Integrates from `initial` to cfg.t_end or until ||u||_inf >= threshold.
Trajectory run(const SimConfig& cfg, const SpectralField& initial);

struct ColeHopfConfig {
  GridSpec grid{63};
  Scheme scheme = preset_centered(12);
  Mollifier mollifier{MollifierKind::indicator};
  double eps_reg = 0.25;
  double t_end = 0.1;
  std::vector<double> dts{4e-5, 2e-5, 1e-5};
  int replicas = 8;
  /// h0(x) = amplitude * (sin x + 0.5 cos 2x)
  double initial_amplitude = 0.5;
  double noise_amplitude = 1.0;
  std::uint64_t seed = 0;
};

struct ColeHopfReport {
  std::vector<double> dts;
  /// Replica mean of sup_{t, x} |exp(h) - w| per dt.
  std::vector<double> sup_errors;
  double sup_error;  // at the smallest dt
  double dt_order;   // least-squares slope of log error against log dt
  double renorm_constant;
};

/// (4 pi)^{-1} sum_{|k| < N/2} phi(eps_reg k)^2.
double lattice_renorm_sum(const Mollifier& m, double eps_reg, const GridSpec& grid);

/// sup over t <= T and sites of |exp(h) - w| for one matched KPZ / heat pair.
double cole_hopf_sup_error(const ColeHopfConfig& cfg, double dt, std::uint64_t replica);
ColeHopfReport cole_hopf_check(const ColeHopfConfig& cfg);

using SpaceTimeFunction = std::function<double(double t, double x)>;
using SpaceFunction = std::function<double(double x)>;

struct FeynmanKacEstimate {
  double mean;     // log E[exp(Y)]
  double std_err;  // delta method
  double jensen_mean;     // E[Y]
  double jensen_std_err;
  int n_paths;
};

/// Y = h_bar(x + B_T) + int_0^T theta(T - s, x + B_s) ds with d<B> = 2 dt,
/// Euler paths of `steps` steps and trapezoidal time integration.
/// Throws std::invalid_argument when n_paths < 100.
FeynmanKacEstimate feynman_kac_mc(const SpaceTimeFunction& theta, const SpaceFunction& h_bar,
                                  double t_end, double x, int n_paths, NoiseStream& stream,
                                  int steps = 500);

struct JensenCheck {
  bool holds;
  double lower;   // E[Y]
  double upper;   // log E[exp Y]
  double slack;   // upper + 3 * combined std error - lower
};

/// v = 0 direction of the variational formula: E[Y] <= log E[exp Y].
JensenCheck variational_lower_bound_check(const FeynmanKacEstimate& est);

/// Pseudo-spectral solve of d_t h = h_xx + (h_x)^2 + theta(t, x) on the torus with
/// exact multipliers, 2/3 dealiasing and integrating-factor RK4.
/// Returns the lattice samples of h(T) on a grid of n points (odd).
LatticeField kpz_spectral_deterministic(const SpaceTimeFunction& theta, const SpaceFunction& h0,
                                        double t_end, int n, double dt);

}  // namespace kpzlab
