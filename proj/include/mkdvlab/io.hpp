#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mkdvlab/field.hpp"
#include "mkdvlab/flow.hpp"
#include "mkdvlab/hierarchy.hpp"

namespace mkdv::io {

using json = nlohmann::json;

/// {"K": int, "coeffs": [[re, im], ...]} ordered k = -K..K.
json field_to_json(const SpectralField& u);
SpectralField field_from_json(const json& j);

void save_field(const SpectralField& u, const std::filesystem::path& path);
SpectralField load_field(const std::filesystem::path& path);

/// columns x, re(u), im(u)
void write_grid_csv(const GridEvaluation& g, const std::filesystem::path& path);

/// columns t, E1, E3, E5, Hs_<s>...
void write_trajectory_csv(const TrajectoryRecord& traj, const std::filesystem::path& path);

json energy_report_to_json(const EnergyReport& rep);
std::string energy_report_csv_row(const EnergyReport& rep);

/// Atomic write: tmp file + rename.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace mkdv::io
