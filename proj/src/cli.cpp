#include "kpzlab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <set>

#include <CLI11.hpp>

#include "kpzlab/constants.hpp"
#include "kpzlab/experiments.hpp"
#include "kpzlab/io.hpp"

namespace kpzlab {

namespace {

constexpr int kConfigVersion = 1;

// Reads typed keys with defaults, records the resolved values and rejects
// keys nobody asked for.
class ConfigReader {
 public:
  explicit ConfigReader(json j) : j_(std::move(j)) {
    if (!j_.is_object()) throw ConfigError("config must be a JSON object");
    if (!j_.contains("version")) throw ConfigError("config needs a \"version\" field");
    if (j_.at("version") != kConfigVersion) {
      throw ConfigError("unsupported config version " + j_.at("version").dump());
    }
    seen_.insert("version");
    resolved_["version"] = kConfigVersion;
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    T v = std::move(fallback);
    if (j_.contains(key)) {
      try {
        v = j_.at(key).get<T>();
      } catch (const json::exception& e) {
        throw ConfigError("config key \"" + key + "\": " + e.what());
      }
    }
    resolved_[key] = v;
    return v;
  }

  json raw(const std::string& key, json fallback) {
    seen_.insert(key);
    json v = j_.contains(key) ? j_.at(key) : std::move(fallback);
    resolved_[key] = v;
    return v;
  }

  void set(const std::string& key, json value) { resolved_[key] = std::move(value); }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown config key \"" + key + "\"");
    }
  }

  const json& resolved() const { return resolved_; }

 private:
  json j_;
  json resolved_ = json::object();
  std::set<std::string> seen_;
};

struct Outcome {
  json result = json::object();
  bool passed = true;
  bool blown_up = false;
};

struct Options {
  std::string command;
  std::string config_path;
  bool check = false;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
};

GridSpec grid_from(int n) {
  if (n < 3 || n % 2 == 0) throw ConfigError("grid size n must be odd and at least 3");
  return GridSpec(n);
}

Scheme checked_scheme(ConfigReader& cfg, const std::string& fallback) {
  const json s = cfg.raw("scheme", fallback);
  Scheme scheme = scheme_from_json(s);
  const ValidationReport v = validate(scheme);
  if (!v.passed("laplacian.positive") || !v.passed("laplacian.symmetric") || !v.passed("derivative.mass_zero")) {
    std::string failed;
    for (const auto& c : v.checks) {
      if (!c.passed) failed += " " + c.name;
    }
    throw ConfigError("scheme fails hypotheses:" + failed);
  }
  return scheme;
}

std::optional<Mollifier> mollifier_from(const std::string& name) {
  if (name == "none") return std::nullopt;
  try {
    return Mollifier::by_name(name);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

std::uint64_t seed_from(ConfigReader& cfg, const Options& opt) {
  std::uint64_t seed = cfg.get<std::uint64_t>("seed", 0);
  if (opt.seed) {
    seed = *opt.seed;
    cfg.set("seed", seed);
  }
  return seed;
}

json stat_json(const StatReport& r) {
  return {{"name", r.name},       {"statistic_name", r.statistic_name}, {"statistic", r.statistic},
          {"p_value", r.p_value}, {"level", r.level},                   {"passed", r.passed},
          {"n1", r.n1},           {"n2", r.n2},                         {"target", r.target}};
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << text;
}

// simulate -------------------------------------------------------------------

Outcome cmd_simulate(ConfigReader& cfg, const Options& opt) {
  SimConfig sim;
  sim.grid = grid_from(cfg.get<int>("n", 63));
  sim.scheme = checked_scheme(cfg, "standard");
  sim.equation = equation_from_string(cfg.get<std::string>("equation", "burgers"));
  sim.dt = cfg.get<double>("dt", 1e-4);
  sim.t_end = cfg.get<double>("t_end", 1.0);
  sim.renorm_constant = cfg.get<double>("renorm_constant", 0.0);
  sim.blowup_threshold = cfg.get<double>("blowup_threshold", 0.0);
  sim.mollifier = mollifier_from(cfg.get<std::string>("mollifier", "none"));
  sim.eps_reg = cfg.get<double>("eps_reg", 0.0);
  sim.noise_amplitude = cfg.get<double>("noise_amplitude", 1.0);
  sim.nonlinear = cfg.get<bool>("nonlinear", true);
  sim.snapshot_stride = cfg.get<int>("snapshot_stride", 0);
  sim.seed = seed_from(cfg, opt);
  sim.stream = cfg.get<std::uint64_t>("stream", 0);
  const std::string initial = cfg.get<std::string>("initial", "zero");
  const double initial_mean = cfg.get<double>("initial_mean", 0.0);
  const double initial_amplitude = cfg.get<double>("initial_amplitude", 1.0);
  cfg.finish();
  check_config(sim);

  // The initial state draws from its own stream so it never overlaps the dynamics.
  NoiseStream init_stream(sim.seed, sim.stream + (std::uint64_t{1} << 32));
  SpectralField u0(sim.grid, true);
  if (initial == "zero") {
  } else if (initial == "stationary_ou") {
    u0 = stationary_ou_init(sim.grid, sim.scheme, init_stream);
  } else if (initial == "white_noise") {
    u0 = dft_forward(sample_white_noise_measure(sim.grid, initial_mean, init_stream));
  } else if (initial == "sine") {
    std::vector<double> v(static_cast<std::size_t>(sim.grid.size()));
    for (int l = 0; l < sim.grid.size(); ++l) v[static_cast<std::size_t>(l)] = initial_amplitude * std::sin(sim.grid.site(l));
    u0 = dft_forward(LatticeField::from_real(sim.grid, v));
  } else {
    throw ConfigError("unknown initial condition: " + initial);
  }

  const Trajectory traj = run(sim, u0);
  const std::filesystem::path out(opt.out_dir);
  {
    std::ofstream os(out / "trajectory.jsonl");
    write_trajectory_jsonl(os, traj);
  }
  {
    std::ofstream os(out / "summary.csv");
    write_summary_csv(os, traj);
  }
  Outcome o;
  o.blown_up = traj.blown_up_at.has_value();
  o.passed = !o.blown_up;
  o.result["snapshots"] = traj.states.size();
  o.result["final_time"] = traj.times.back();
  o.result["blown_up_at"] = traj.blown_up_at ? json(*traj.blown_up_at) : json(nullptr);
  o.result["lost_positivity"] = traj.lost_positivity;
  const LatticeField last = dft_inverse(traj.states.back());
  o.result["final_l2_norm"] = std::sqrt(lattice_l2_squared(last));
  o.result["final_linf_norm"] = last.max_abs();
  return o;
}

// invariance -----------------------------------------------------------------

Outcome cmd_invariance(ConfigReader& cfg, const Options& opt) {
  InvarianceConfig inv;
  inv.n = grid_from(cfg.get<int>("n", 63)).size();
  inv.scheme = checked_scheme(cfg, "sasamoto_spohn");
  inv.mean = cfg.get<double>("mean", 0.0);
  inv.replicas = cfg.get<int>("replicas", 256);
  inv.t_end = cfg.get<double>("t_end", 1.0);
  inv.dt = cfg.get<double>("dt", 1e-4);
  inv.level = cfg.get<double>("level", 0.01);
  inv.seed = seed_from(cfg, opt);
  cfg.finish();
  const InvarianceReport rep = invariance_experiment(inv);
  Outcome o;
  o.result["tests"] = json::array();
  for (const auto& t : rep.tests) o.result["tests"].push_back(stat_json(t));
  o.result["conservative_scheme"] = rep.conservative;
  o.result["warning"] = rep.warning ? json("scheme is not energy conserving; invariance is not claimed") : json(nullptr);
  o.result["blown_up_replicas"] = rep.blown_up_replicas;
  o.blown_up = rep.blown_up_replicas > 0;
  o.passed = rep.passed();
  return o;
}

// constants ------------------------------------------------------------------

Outcome cmd_constants(ConfigReader& cfg, const Options&) {
  const Scheme scheme = checked_scheme(cfg, "standard");
  const double abs_tol = cfg.get<double>("abs_tol", 1e-10);
  const json expected_c = cfg.raw("expected_c", nullptr);
  const double expected_tol = cfg.get<double>("expected_tolerance", 1e-8);
  const auto mollifier = mollifier_from(cfg.get<std::string>("mollifier", "indicator"));
  if (!mollifier) throw ConfigError("constants needs a mollifier");
  const GridSpec grid = grid_from(cfg.get<int>("n", 201));
  const auto vertex_k = cfg.get<std::vector<int>>("vertex_k", {2, 4, 8, 16, 32, 64, 128});
  const int k_trunc = cfg.get<int>("k_trunc", 256);
  const auto zc_n = cfg.get<std::vector<int>>("zero_chaos_n", {255, 511, 1023});
  const double zc_t = cfg.get<double>("zero_chaos_t", 1.0);
  const int canc_trunc = cfg.get<int>("cancellation_k_trunc", 64);
  const double canc_tol = cfg.get<double>("cancellation_tol", 1e-7);
  cfg.finish();
  if (k_trunc < 64 || canc_trunc < 1) throw ConfigError("k_trunc must be at least 64");
  if (!(abs_tol > 0.0) || !(canc_tol > 0.0)) throw ConfigError("tolerances must be positive");
  for (int n : zc_n) grid_from(n);

  Outcome o;
  auto& r = o.result;
  std::vector<std::string> failures;

  const QuadratureResult c = correction_constant_detail(scheme, {abs_tol, 1 << 20});
  r["c"] = c.value;
  r["c_error_estimate"] = c.error_estimate;
  if (!expected_c.is_null()) {
    const bool ok = std::abs(c.value - expected_c.get<double>()) <= expected_tol;
    r["c_matches_expected"] = ok;
    if (!ok) failures.push_back("c");
  }

  const RenormConstant rc = renormalization_constant(*mollifier, grid, {abs_tol, 1 << 20});
  r["c_eps_continuum"] = rc.continuum;
  r["c_eps_lattice"] = rc.lattice_sum;
  r["c_eps_relative_gap"] = std::abs(rc.lattice_sum - rc.continuum) / rc.continuum;

  r["vertex_table"] = json::array();
  double prev_ratio = std::numeric_limits<double>::infinity();
  bool monotone = true;
  for (int k : vertex_k) {
    const VertexL1 v = vertex_l1_norm(k, {k_trunc, 0.0}, {abs_tol, 1 << 22});
    const double ratio = v.value / std::pow(std::abs(k), 0.25);
    if (std::abs(k) >= 8) {
      if (ratio > prev_ratio) monotone = false;
      prev_ratio = ratio;
    }
    r["vertex_table"].push_back({{"k", k}, {"value", v.value}, {"ratio_k_quarter", ratio},
                                 {"tail_bound", v.tail_bound}, {"t_trunc", v.t_trunc}});
  }
  r["vertex_ratio_nonincreasing"] = monotone;
  if (!monotone) failures.push_back("vertex");

  r["zero_chaos_table"] = json::array();
  double prev_gap = std::numeric_limits<double>::infinity();
  bool shrinking = true;
  double last_gap = 0.0;
  for (int n : zc_n) {
    const double v = discrete_zero_chaos(scheme, n, zc_t);
    last_gap = std::abs(v - c.value);
    if (last_gap > prev_gap) shrinking = false;
    prev_gap = last_gap;
    r["zero_chaos_table"].push_back({{"n", n}, {"value", v}, {"gap", last_gap}});
  }
  const bool close = c.value != 0.0 ? last_gap <= 0.05 * std::abs(c.value) : last_gap <= 1e-10;
  r["zero_chaos_converging"] = shrinking && close;
  if (!(shrinking && close)) failures.push_back("zero_chaos");

  const Cancellation cc = kpz_cancellation(*mollifier, canc_trunc, {canc_tol, 1 << 22});
  const double stability = std::abs(cc.regularized_limit_refined - cc.regularized_limit) /
                           std::max(std::abs(cc.regularized_limit_refined), 1e-300);
  r["cancellation"] = {{"symmetric_zero", cc.symmetric_zero},
                       {"scale", cc.scale},
                       {"k_trunc", canc_trunc},
                       {"regularized_limit", cc.regularized_limit},
                       {"regularized_limit_refined", cc.regularized_limit_refined},
                       {"relative_change", stability},
                       {"error_estimate", cc.quad.error_estimate}};
  const bool cancel_ok = std::abs(cc.symmetric_zero) <= 1e-12 * cc.scale && std::isfinite(cc.regularized_limit) &&
                         (cc.regularized_limit_refined == 0.0 || stability <= 0.01);
  if (!cancel_ok) failures.push_back("cancellation");

  r["failed_checks"] = failures;
  o.passed = failures.empty();
  return o;
}

// regularity -----------------------------------------------------------------

Outcome cmd_regularity(ConfigReader& cfg, const Options& opt) {
  RegularityConfig rc;
  rc.n = grid_from(cfg.get<int>("n", 1023)).size();
  rc.scheme = checked_scheme(cfg, "standard");
  const std::string source = cfg.get<std::string>("source", "stationary_ou");
  if (source == "stationary_ou") {
    rc.source = EnsembleSource::stationary_ou;
  } else if (source == "white_noise") {
    rc.source = EnsembleSource::white_noise;
  } else {
    throw ConfigError("unknown ensemble source: " + source);
  }
  rc.replicas = cfg.get<int>("replicas", 256);
  const json p = cfg.raw("p", "inf");
  if (p.is_string() && p.get<std::string>() == "inf") {
    rc.p = 0.0;
  } else if (p.is_number() && p.get<double>() >= 1.0) {
    rc.p = p.get<double>();
  } else {
    throw ConfigError("p must be \"inf\" or a number >= 1");
  }
  const json range = cfg.raw("fit_range", nullptr);
  if (!range.is_null()) {
    if (!range.is_array() || range.size() != 2) throw ConfigError("fit_range must be [j_lo, j_hi]");
    rc.j_lo = range[0].get<int>();
    rc.j_hi = range[1].get<int>();
  }
  const auto accept = cfg.get<std::vector<double>>("accept_range", {-0.65, -0.40});
  if (accept.size() != 2) throw ConfigError("accept_range must have two entries");
  rc.seed = seed_from(cfg, opt);
  cfg.finish();
  if (rc.replicas < 1) throw ConfigError("replicas must be positive");

  RegularityFit fit;
  try {
    fit = regularity_experiment(rc);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  {
    std::ofstream os(std::filesystem::path(opt.out_dir) / "profile.csv");
    write_profile_csv(os, fit.mean_profile);
  }
  Outcome o;
  o.result = {{"alpha_hat", fit.alpha_hat}, {"r_squared", fit.r_squared}, {"fit_range", {fit.j_lo, fit.j_hi}}};
  o.passed = fit.alpha_hat >= accept[0] && fit.alpha_hat <= accept[1];
  return o;
}

// cole-hopf ------------------------------------------------------------------

Outcome cmd_cole_hopf(ConfigReader& cfg, const Options& opt) {
  ColeHopfConfig ch;
  ch.grid = grid_from(cfg.get<int>("n", 63));
  ch.scheme = checked_scheme(cfg, "centered(12)");
  const auto moll = mollifier_from(cfg.get<std::string>("mollifier", "indicator"));
  if (!moll) throw ConfigError("cole-hopf needs a mollifier");
  ch.mollifier = *moll;
  ch.eps_reg = cfg.get<double>("eps_reg", 0.25);
  ch.t_end = cfg.get<double>("t_end", 0.1);
  ch.dts = cfg.get<std::vector<double>>("dts", {4e-5, 2e-5, 1e-5});
  ch.replicas = cfg.get<int>("replicas", 8);
  ch.initial_amplitude = cfg.get<double>("initial_amplitude", 0.5);
  ch.noise_amplitude = cfg.get<double>("noise_amplitude", 1.0);
  const double min_order = cfg.get<double>("min_order", 0.4);
  ch.seed = seed_from(cfg, opt);
  cfg.finish();
  const double eps = ch.grid.spacing();
  for (double dt : ch.dts) {
    if (!(dt > 0.0) || dt > eps * eps) throw ConfigError("every dt must lie in (0, eps^2]");
  }
  if (!(ch.eps_reg > 0.0)) throw ConfigError("eps_reg must be positive");

  const ColeHopfReport rep = cole_hopf_check(ch);
  Outcome o;
  o.result = {{"dts", rep.dts},
              {"sup_errors", rep.sup_errors},
              {"sup_error", rep.sup_error},
              {"dt_order", rep.dt_order},
              {"renorm_constant", rep.renorm_constant}};
  o.blown_up = std::any_of(rep.sup_errors.begin(), rep.sup_errors.end(), [](double e) { return !std::isfinite(e); });
  o.passed = !o.blown_up && rep.dt_order >= min_order;
  return o;
}

// feynman-kac ----------------------------------------------------------------

Outcome cmd_feynman_kac(ConfigReader& cfg, const Options& opt) {
  FeynmanKacConfig fk;
  fk.t_end = cfg.get<double>("t_end", 0.25);
  fk.x = cfg.get<double>("x", 0.0);
  fk.n_paths = cfg.get<int>("n_paths", 10000);
  fk.path_steps = cfg.get<int>("path_steps", 500);
  fk.reference_n = grid_from(cfg.get<int>("reference_n", 127)).size();
  fk.reference_dt = cfg.get<double>("reference_dt", 1e-4);
  fk.sigmas = cfg.get<double>("sigmas", 3.0);
  fk.seed = seed_from(cfg, opt);
  cfg.finish();
  if (fk.n_paths < 100) throw ConfigError("n_paths must be at least 100");
  if (!(fk.t_end > 0.0) || fk.path_steps < 1 || !(fk.reference_dt > 0.0)) throw ConfigError("bad time grid");

  const FeynmanKacReport rep = feynman_kac_experiment(fk);
  Outcome o;
  o.result = {{"estimate", rep.estimate.mean},
              {"std_err", rep.estimate.std_err},
              {"reference", rep.reference},
              {"z_score", rep.z_score},
              {"matches_reference", rep.matches},
              {"jensen_lower", rep.jensen.lower},
              {"jensen_slack", rep.jensen.slack},
              {"jensen_holds", rep.jensen.holds}};
  o.passed = rep.matches && rep.jensen.holds;
  return o;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> commands{"simulate",   "invariance", "constants",
                                                 "regularity", "cole-hopf",  "feynman-kac"};
  Options opt;
  CLI::App app{"kpzlab: lattice KPZ / Burgers toolkit", "kpzlab"};
  std::uint64_t seed = 0;
  app.add_option("command", opt.command, "Experiment to run")->required()->check(CLI::IsMember(commands));
  app.add_option("--config", opt.config_path, "JSON configuration file")->required();
  app.add_flag("--check", opt.check, "Exit nonzero when an acceptance check fails");
  auto* seed_opt = app.add_option("--seed", seed, "Override the configured seed");
  app.add_option("--out", opt.out_dir, "Output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "kpzlab: " << e.what() << '\n';
    return kExitConfig;
  }
  if (seed_opt->count() > 0) opt.seed = seed;

  std::optional<ConfigReader> reader;
  try {
    std::ifstream is(opt.config_path);
    if (!is) throw ConfigError("cannot open config file " + opt.config_path);
    json parsed;
    try {
      parsed = json::parse(is);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    reader.emplace(std::move(parsed));
    std::filesystem::create_directories(opt.out_dir);
  } catch (const std::exception& e) {
    err << "kpzlab: " << e.what() << '\n';
    return kExitConfig;
  }

  Outcome outcome;
  try {
    if (opt.command == "simulate") outcome = cmd_simulate(*reader, opt);
    if (opt.command == "invariance") outcome = cmd_invariance(*reader, opt);
    if (opt.command == "constants") outcome = cmd_constants(*reader, opt);
    if (opt.command == "regularity") outcome = cmd_regularity(*reader, opt);
    if (opt.command == "cole-hopf") outcome = cmd_cole_hopf(*reader, opt);
    if (opt.command == "feynman-kac") outcome = cmd_feynman_kac(*reader, opt);
  } catch (const ConfigError& e) {
    err << "kpzlab: config rejected: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "kpzlab: error: " << e.what() << '\n';
    return kExitInternal;
  }

  int code = kExitPass;
  if (outcome.blown_up) {
    code = kExitBlowUp;
  } else if (opt.check && !outcome.passed) {
    code = kExitInternal;
  }

  json report;
  report["command"] = opt.command;
  report["library_version"] = KPZLAB_VERSION;
  report["config"] = reader->resolved();
  report["result"] = outcome.result;
  report["passed"] = outcome.passed;
  report["exit_code"] = code;
  // The timestamp lives in its own file so equal runs give byte-identical reports.
  const json metadata = {{"timestamp", utc_timestamp()}, {"command", opt.command}};
  try {
    write_text(std::filesystem::path(opt.out_dir) / "report.json", report.dump(2) + "\n");
    write_text(std::filesystem::path(opt.out_dir) / "metadata.json", metadata.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "kpzlab: " << e.what() << '\n';
    return kExitInternal;
  }
  out << report.dump(2) << '\n';
  return code;
}

}  // namespace kpzlab
