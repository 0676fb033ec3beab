#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mkdvlab/hierarchy.hpp"
#include "mkdvlab/io.hpp"
#include "mkdvlab/runner.hpp"
#include "test_util.hpp"

using namespace mkdv;
using namespace mkdv::testutil;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mkdv_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("field json round trip") {
  const SpectralField u = random_field(5, 3);
  const SpectralField back = io::field_from_json(io::field_to_json(u));
  CHECK(max_coeff_dist(back, u) == 0.0);
  const fs::path dir = fresh_dir("fieldio");
  io::save_field(u, dir / "f.json");
  CHECK(max_coeff_dist(io::load_field(dir / "f.json"), u) == 0.0);
}

TEST_CASE("config parsing rejects unknown keys") {
  nlohmann::json j;
  j["experiment"] = "sample";
  j["K"] = 4;
  j["n_samples"] = 3;
  j["typo_field"] = 1;
  CHECK_THROWS_WITH_AS(config_from_json(j), "config: unknown key 'typo_field'",
                       std::invalid_argument);
  j.erase("typo_field");
  const RunConfig c = config_from_json(j);
  CHECK(c.experiment == "sample");
  CHECK(c.K == 4);
}

TEST_CASE("MKDV_SEED environment override") {
  const fs::path dir = fresh_dir("envseed");
  nlohmann::json j;
  j["experiment"] = "sample";
  j["K"] = 2;
  j["n_samples"] = 1;
  j["seed"] = 7;
  io::write_text_atomic(dir / "cfg.json", j.dump());
  setenv("MKDV_SEED", "99", 1);
  const RunConfig c = load_config(dir / "cfg.json");
  unsetenv("MKDV_SEED");
  CHECK(c.seed == 99);
  const RunConfig c2 = load_config(dir / "cfg.json");
  CHECK(c2.seed == 7);
}

TEST_CASE("sample experiment is byte-deterministic") {
  const fs::path dir = fresh_dir("sample");
  RunConfig c;
  c.experiment = "sample";
  c.n = 2;
  c.K = 8;
  c.n_samples = 5;
  c.seed = 31;
  c.output_dir = (dir / "out").string();
  run_experiment(c, 1);
  const std::string first = slurp(dir / "out" / "state_00000.json");
  const std::string spectrum = slurp(dir / "out" / "spectrum.csv");
  run_experiment(c, 1);
  CHECK(slurp(dir / "out" / "state_00000.json") == first);
  CHECK(slurp(dir / "out" / "spectrum.csv") == spectrum);
  CHECK(fs::exists(dir / "out" / "run.json"));
}

TEST_CASE("evolve experiment on a plane wave conserves the energy columns") {
  const fs::path dir = fresh_dir("evolve");
  RunConfig c;
  c.experiment = "evolve";
  c.K = 10;
  c.n_ladder = {3};
  c.t = 0.5;
  c.dt = 1e-3;
  c.n_records = 51;
  c.u0 = "planewave";
  c.amplitude = 1.0;
  c.mode = 1;
  c.s = {1.0};
  c.output_dir = (dir / "out").string();
  const RunResult r = run_experiment(c, 1);
  CHECK(r.summary["e1_drift"].get<double>() < 1e-9);
  CHECK(r.summary["e3_drift"].get<double>() < 1e-9);
  // 4th-order refinement ratio
  const double ratio = r.summary["refinement_ratio"].get<double>();
  CHECK(ratio > 8.0);
  CHECK(fs::exists(dir / "out" / "trajectory.csv"));
  const std::string head = slurp(dir / "out" / "trajectory.csv").substr(0, 20);
  CHECK(head.find("t,E1,E3,E5") == 0);
}

TEST_CASE("manifest round trip reproduces the summary") {
  const fs::path dir = fresh_dir("roundtrip");
  RunConfig c;
  c.experiment = "sample";
  c.K = 6;
  c.n_samples = 4;
  c.seed = 11;
  c.output_dir = (dir / "out").string();
  const RunResult r1 = run_experiment(c, 1);
  // re-load from the manifest and re-run
  const RunConfig c2 = load_config(dir / "out" / "run.json");
  CHECK(c2.seed == 11);
  const RunResult r2 = run_experiment(c2, 1);
  CHECK(r1.summary.dump() == r2.summary.dump());
}

TEST_CASE("estar experiment emits the agreement table") {
  const fs::path dir = fresh_dir("estar");
  RunConfig c;
  c.experiment = "estar";
  c.n = 2;
  c.K = 13;
  c.n_ladder = {4};
  c.n_samples = 2;
  c.seed = 5;
  c.output_dir = (dir / "out").string();
  const RunResult r = run_experiment(c, 1);
  CHECK(r.summary["max_rel_diff3"].get<double>() < 1e-6);
  CHECK(r.summary["max_rel_diff5"].get<double>() < 1e-6);
  // the raw central-difference columns shrink ~4x per h halving
  std::ifstream csv(dir / "out" / "estar.csv");
  std::string line;
  std::getline(csv, line);  // header
  while (std::getline(csv, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> cells;
    while (std::getline(ss, cell, ','))
      cells.push_back(cell.empty() ? 0.0 : std::stod(cell));
    const double ratio = cells[4] / cells[5];  // cd3_h / cd3_h2
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
  }
}

TEST_CASE("converge experiment fits a negative rate") {
  const fs::path dir = fresh_dir("converge");
  RunConfig c;
  c.experiment = "converge";
  c.K = 25;
  c.n_ladder = {2, 4, 8};
  c.t = 0.2;
  c.dt = 2e-3;
  c.u0 = "hs";
  c.seed = 3;
  c.output_dir = (dir / "out").string();
  const RunResult r = run_experiment(c, 1);
  CHECK(fs::exists(dir / "out" / "converge.csv"));
  CHECK(r.summary.contains("slope"));
  CHECK(r.summary["slope"].get<double>() < 0.0);
}

TEST_CASE("degenerate band K=0 samples constant fields") {
  const fs::path dir = fresh_dir("k0");
  RunConfig c;
  c.experiment = "sample";
  c.K = 0;
  c.n_samples = 3;
  c.seed = 2;
  c.output_dir = (dir / "out").string();
  run_experiment(c, 1);
  const SpectralField u = io::load_field(dir / "out" / "state_00000.json");
  CHECK(u.cutoff() == 0);
  CHECK(u[0] != cplx{});
}

TEST_CASE("grid csv and energy report exports") {
  const fs::path dir = fresh_dir("exports");
  const SpectralField u = random_field(3, 9);
  io::write_grid_csv(to_grid(u, 16), dir / "grid.csv");
  const std::string csv = slurp(dir / "grid.csv");
  CHECK(csv.find("x,re_u,im_u") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);  // header + 16 rows

  const EnergyReport rep = energy_report(u, 2);
  const auto j = io::energy_report_to_json(rep);
  CHECK(j["energies"].size() == 5);
  CHECK(j["n"] == 2);
  const std::string row = io::energy_report_csv_row(rep);
  CHECK(std::count(row.begin(), row.end(), ',') == 5);  // E1..E5, R_n
}

TEST_CASE("unknown experiment is rejected") {
  RunConfig c;
  c.experiment = "frobnicate";
  c.output_dir = (fresh_dir("bad") / "out").string();
  CHECK_THROWS_AS(run_experiment(c, 1), std::invalid_argument);
}
