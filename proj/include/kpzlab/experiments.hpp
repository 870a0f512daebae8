#pragma once

// Statistical tests and the replica-parallel experiment drivers behind the
// command-line tool.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kpzlab/besov.hpp"
#include "kpzlab/dynamics.hpp"
#include "kpzlab/parallel.hpp"
#include "kpzlab/scheme.hpp"

namespace kpzlab {

/// Pass/fail is p_value >= level; everything needed to recheck it is stored.
struct StatReport {
  std::string name;
  std::string statistic_name;
  double statistic = 0.0;
  double p_value = 0.0;
  double level = 0.01;
  bool passed = false;
  long long n1 = 0;
  long long n2 = 0;
  double target = 0.0;
};

/// Two-sided z-test of the sample mean against a known mean and variance.
StatReport z_test_mean(const std::vector<double>& x, double mean, double variance, double level);
/// Two-sided test of sum (x - mean)^2 / variance against chi-square with n degrees of freedom.
StatReport chi_square_variance(const std::vector<double>& x, double mean, double variance, double level);
/// Two-sample Kolmogorov-Smirnov with the asymptotic p-value.
StatReport ks_two_sample(std::vector<double> a, std::vector<double> b, double level);
/// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

struct InvarianceConfig {
  int n = 63;
  Scheme scheme = preset_sasamoto_spohn(1.0, 0.5);
  double mean = 0.0;
  int replicas = 256;
  double t_end = 1.0;
  double dt = 1e-4;
  std::uint64_t seed = 0;
  double level = 0.01;
};

struct InvarianceReport {
  std::vector<StatReport> tests;
  /// The scheme conserves the lattice L2 energy; otherwise invariance is not claimed.
  bool conservative = false;
  bool warning = false;
  int blown_up_replicas = 0;
  bool passed() const;
};

/// Residual of the conservation identity over a few random fields.
bool scheme_is_conservative(const Scheme& scheme, int n, double tol = 1e-11);

/// Throws ConfigError when replicas < 64.
InvarianceReport invariance_experiment(const InvarianceConfig& cfg);

enum class EnsembleSource { stationary_ou, white_noise };

struct RegularityConfig {
  int n = 1023;
  Scheme scheme = preset_standard();
  EnsembleSource source = EnsembleSource::stationary_ou;
  int replicas = 256;
  double p = 0.0;  // 0 means infinity
  int j_lo = -2;
  int j_hi = -2;
  std::uint64_t seed = 0;
};

RegularityFit regularity_experiment(const RegularityConfig& cfg);

struct FeynmanKacConfig {
  double t_end = 0.25;
  double x = 0.0;
  int n_paths = 10000;
  int path_steps = 500;
  int reference_n = 127;
  double reference_dt = 1e-4;
  std::uint64_t seed = 0;
  /// Agreement band in combined standard errors.
  double sigmas = 3.0;
};

struct FeynmanKacReport {
  FeynmanKacEstimate estimate;
  double reference;
  double z_score;
  bool matches;
  JensenCheck jensen;
};

/// theta(t, x) = cos x with zero initial height.
FeynmanKacReport feynman_kac_experiment(const FeynmanKacConfig& cfg);

}  // namespace kpzlab
