#include "kpzlab/io.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <regex>

namespace kpzlab {

json scheme_to_json(const Scheme& s) {
  json j;
  j["name"] = s.name;
  j["pi"] = json::array();
  for (const auto& a : s.pi) j["pi"].push_back({a.offset, a.weight});
  j["nu"] = json::array();
  for (const auto& a : s.nu) j["nu"].push_back({a.offset, a.weight});
  j["mu"] = json::array();
  for (const auto& a : s.mu) j["mu"].push_back({a.y, a.z, a.weight});
  return j;
}

namespace {

Scheme preset_by_name(const std::string& name) {
  if (name == "standard") return preset_standard();
  if (name == "sasamoto_spohn") return preset_sasamoto_spohn();
  static const std::regex ss(R"(sasamoto_spohn\(\s*([-+0-9.eE]+)\s*,\s*([-+0-9.eE]+)\s*\))");
  static const std::regex centered(R"(centered\(\s*([0-9]+)\s*\))");
  std::smatch m;
  try {
    if (std::regex_match(name, m, ss)) return preset_sasamoto_spohn(std::stod(m[1]), std::stod(m[2]));
    if (std::regex_match(name, m, centered)) return preset_centered(std::stoi(m[1]));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scheme preset: ") + e.what());
  }
  throw ConfigError("unknown scheme preset: " + name);
}

}  // namespace

Scheme scheme_from_json(const json& j) {
  if (j.is_string()) return preset_by_name(j.get<std::string>());
  if (!j.is_object()) throw ConfigError("scheme must be a preset name or an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "name" && key != "pi" && key != "nu" && key != "mu") throw ConfigError("scheme: unknown key " + key);
  }
  Scheme s;
  try {
    s.name = j.value("name", std::string("custom"));
    for (const auto& a : j.at("pi")) s.pi.push_back({a.at(0).get<int>(), a.at(1).get<double>()});
    for (const auto& a : j.at("nu")) s.nu.push_back({a.at(0).get<int>(), a.at(1).get<double>()});
    for (const auto& a : j.at("mu")) s.mu.push_back({a.at(0).get<int>(), a.at(1).get<int>(), a.at(2).get<double>()});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scheme: ") + e.what());
  }
  return s;
}

void write_field_csv(std::ostream& os, const LatticeField& u) {
  os << "x,value\n" << std::setprecision(17);
  for (int l = 0; l < u.grid().size(); ++l) os << u.grid().site(l) << ',' << u[static_cast<std::size_t>(l)].real() << '\n';
}

void write_spectrum_csv(std::ostream& os, const SpectralField& u) {
  os << "k,re,im\n" << std::setprecision(17);
  for (int k = -u.grid().max_mode(); k <= u.grid().max_mode(); ++k) {
    os << k << ',' << u.at(k).real() << ',' << u.at(k).imag() << '\n';
  }
}

void write_trajectory_jsonl(std::ostream& os, const Trajectory& traj) {
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    json rec;
    rec["t"] = traj.times[i];
    rec["field"] = dft_inverse(traj.states[i]).real_part();
    os << rec.dump() << '\n';
  }
}

void write_summary_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,l2_norm,linf_norm,mode0\n" << std::setprecision(17);
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const LatticeField x = dft_inverse(traj.states[i]);
    os << traj.times[i] << ',' << std::sqrt(lattice_l2_squared(x)) << ',' << x.max_abs() << ','
       << traj.states[i].at(0).real() << '\n';
  }
}

void write_profile_csv(std::ostream& os, const BesovProfile& profile) {
  os << "j,block_norm\n" << std::setprecision(17);
  for (int j = -1; j <= profile.j_max(); ++j) os << j << ',' << profile.at(j) << '\n';
}

}  // namespace kpzlab
