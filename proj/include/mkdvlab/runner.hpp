#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mkdvlab/field.hpp"

namespace mkdv {

/// Flat experiment configuration (one JSON object, unknown keys are a hard
/// error). Seed precedence: config < MKDV_SEED env < --seed flag.
struct RunConfig {
  std::string experiment;
  int n = 2;
  std::vector<int> n_ladder;
  int K = 0;
  std::vector<double> s;
  double R = 5.0;
  double t = 0.0;
  double dt = 0.0;
  long n_samples = 0;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  // experiment-specific knobs
  std::string u0 = "random";   // "random" | "planewave" | "hs" | path to a field JSON
  double amplitude = 1.0;
  int mode = 1;
  double radius = 0.0;         // <= 0: use the empirical median H^s radius
  int n_records = 101;
  std::vector<double> thresholds;

  nlohmann::json to_json() const;
};

RunConfig config_from_json(const nlohmann::json& j);
/// Reads a config file; a saved manifest (run.json) is accepted too, its
/// embedded config is used. Applies the MKDV_SEED env override.
RunConfig load_config(const std::filesystem::path& path);

struct RunResult {
  nlohmann::json summary;
};

/// Dispatch on config.experiment; writes data files and the run.json manifest
/// into config.output_dir, returns the summary block.
RunResult run_experiment(const RunConfig& config, int workers);

SpectralField make_initial_condition(const RunConfig& config);

std::string version_string();

}  // namespace mkdv
