#pragma once

// Serialization: scheme JSON, field CSVs, trajectory JSONL and summary CSV.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "kpzlab/besov.hpp"
#include "kpzlab/dynamics.hpp"
#include "kpzlab/scheme.hpp"

namespace kpzlab {

using json = nlohmann::json;

/// {"name", "pi": [[offset, weight]], "nu": [...], "mu": [[y, z, weight]]}
json scheme_to_json(const Scheme& s);
/// Accepts the object form or a preset name: "standard", "sasamoto_spohn",
/// "sasamoto_spohn(kappa,lambda)" or "centered(order)". Throws ConfigError.
Scheme scheme_from_json(const json& j);

/// Columns x, value.
void write_field_csv(std::ostream& os, const LatticeField& u);
/// Columns k, re, im.
void write_spectrum_csv(std::ostream& os, const SpectralField& u);
/// One {"t": ..., "field": [site values]} record per snapshot.
void write_trajectory_jsonl(std::ostream& os, const Trajectory& traj);
/// Columns t, l2_norm, linf_norm, mode0.
void write_summary_csv(std::ostream& os, const Trajectory& traj);
/// Columns j, block_norm.
void write_profile_csv(std::ostream& os, const BesovProfile& profile);

}  // namespace kpzlab
