#include "mkdvlab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include "mkdvlab/hierarchy.hpp"
#include "mkdvlab/io.hpp"
#include "mkdvlab/measures.hpp"
#include "mkdvlab/pairing.hpp"
#include "mkdvlab/rng.hpp"
#include "mkdvlab/stats.hpp"

namespace mkdv {

using nlohmann::json;
namespace fs = std::filesystem;

std::string version_string() { return std::string("mkdvlab ") + MKDV_VERSION; }

json RunConfig::to_json() const {
  json j;
  j["experiment"] = experiment;
  j["n"] = n;
  j["N_ladder"] = n_ladder;
  j["K"] = K;
  j["s"] = s;
  j["R"] = R;
  j["t"] = t;
  j["dt"] = dt;
  j["n_samples"] = n_samples;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["u0"] = u0;
  j["amplitude"] = amplitude;
  j["mode"] = mode;
  j["radius"] = radius;
  j["n_records"] = n_records;
  j["thresholds"] = thresholds;
  return j;
}

RunConfig config_from_json(const json& j) {
  static const std::vector<std::string> known = {
      "experiment", "n", "N_ladder", "K", "s", "R", "t", "dt", "n_samples",
      "seed", "output_dir", "u0", "amplitude", "mode", "radius", "n_records",
      "thresholds"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw std::invalid_argument("config: unknown key '" + it.key() + "'");
  }
  RunConfig c;
  c.experiment = j.at("experiment").get<std::string>();
  if (j.contains("n")) c.n = j["n"].get<int>();
  if (j.contains("N_ladder")) c.n_ladder = j["N_ladder"].get<std::vector<int>>();
  if (j.contains("K")) c.K = j["K"].get<int>();
  if (j.contains("s")) c.s = j["s"].get<std::vector<double>>();
  if (j.contains("R")) c.R = j["R"].get<double>();
  if (j.contains("t")) c.t = j["t"].get<double>();
  if (j.contains("dt")) c.dt = j["dt"].get<double>();
  if (j.contains("n_samples")) c.n_samples = j["n_samples"].get<long>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("u0")) c.u0 = j["u0"].get<std::string>();
  if (j.contains("amplitude")) c.amplitude = j["amplitude"].get<double>();
  if (j.contains("mode")) c.mode = j["mode"].get<int>();
  if (j.contains("radius")) c.radius = j["radius"].get<double>();
  if (j.contains("n_records")) c.n_records = j["n_records"].get<int>();
  if (j.contains("thresholds"))
    c.thresholds = j["thresholds"].get<std::vector<double>>();
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  json j;
  in >> j;
  if (j.contains("config") && j["config"].is_object() &&
      j["config"].contains("experiment"))
    j = j["config"];  // a saved manifest
  RunConfig c = config_from_json(j);
  if (const char* env = std::getenv("MKDV_SEED")) {
    c.seed = std::strtoull(env, nullptr, 10);
  }
  return c;
}

SpectralField make_initial_condition(const RunConfig& config) {
  if (config.u0 == "planewave") {
    SpectralField u(config.K);
    u[config.mode] = cplx{config.amplitude, 0.0};
    return u;
  }
  if (config.u0 == "random") {
    GaussianSamplerSpec spec{config.n, config.K, config.seed, /*stream*/ 1};
    return sample_mu(spec);
  }
  if (config.u0 == "hs") {
    // deterministic H^{3/2}-borderline data: |c_j| = (1+j^2)^{-1}, random phases
    GaussianStream g(config.seed, 2);
    SpectralField u(config.K);
    for (int j = -config.K; j <= config.K; ++j) {
      const double mag = 1.0 / (1.0 + static_cast<double>(j) * j);
      u[j] = std::polar(mag, kTwoPi * g.uniform());
    }
    return u;
  }
  return io::load_field(config.u0);
}

namespace {

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
  return buf;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

int first_n(const RunConfig& c) {
  if (c.n_ladder.empty()) throw std::invalid_argument("config: N_ladder required");
  return c.n_ladder.front();
}

int fft_grid_for(const SpectralField& u) {
  return std::max(4 * u.cutoff(), 16);
}

// ---- sample ----
json run_sample(const RunConfig& c, int workers, const fs::path& dir) {
  GaussianSamplerSpec spec{c.n, c.K, c.seed, 0};
  const long n = std::max<long>(1, c.n_samples);
  std::vector<double> mean_sq(2 * c.K + 1, 0.0);
  std::vector<std::vector<double>> per_mode(2 * c.K + 1);
  const long keep_files = std::min<long>(n, 64);
  for (long i = 0; i < n; ++i) {
    const SpectralField u = sample_mu(sub_stream(spec, i));
    for (int k = -c.K; k <= c.K; ++k) mean_sq[k + c.K] += std::norm(u[k]);
    if (i < keep_files) {
      char name[32];
      std::snprintf(name, sizeof name, "state_%05ld.json", i);
      io::save_field(u, dir / name);
    }
  }
  (void)workers;
  std::ostringstream os;
  os << "j,mean_sq,expected\n";
  double max_rel = 0.0;
  for (int k = -c.K; k <= c.K; ++k) {
    const double m = mean_sq[k + c.K] / n;
    const double expct =
        1.0 / (kTwoPi * (1.0 + std::pow(static_cast<double>(k), 2.0 * c.n)));
    os << k << ',' << fmt(m) << ',' << fmt(expct) << '\n';
    max_rel = std::max(max_rel, std::abs(m - expct) / expct);
  }
  io::write_text_atomic(dir / "spectrum.csv", os.str());
  json sum;
  sum["n_samples"] = n;
  sum["fields_written"] = keep_files;
  sum["spectrum_max_rel_dev"] = max_rel;
  return sum;
}

// ---- evolve ----
json run_evolve(const RunConfig& c, int /*workers*/, const fs::path& dir) {
  const int N = first_n(c);
  const SpectralField u0 = make_initial_condition(c);
  FlowParams p{N, u0.cutoff(), c.dt};
  const TrajectoryRecord traj =
      evolve_trajectory(u0, c.t, std::max(2, c.n_records), p, c.s);
  io::write_trajectory_csv(traj, dir / "trajectory.csv");
  io::save_field(u0, dir / "state_initial.json");
  io::save_field(traj.snapshots.back(), dir / "state_final.json");
  io::write_text_atomic(dir / "energy_report.json",
                        io::energy_report_to_json(energy_report(u0, 2)).dump(2) + "\n");
  io::write_grid_csv(to_grid(u0, fft_grid_for(u0)), dir / "state_initial_grid.csv");
  const ConservationReport rep = conservation_report(traj, N);
  // dt-refinement factor on the final state (integrator error is 4th order)
  json sum;
  if (c.t != 0.0) {
    FlowParams ph = p;
    ph.dt = (p.dt > 0 ? p.dt : default_dt(u0)) / 2.0;
    const SpectralField fine = evolve(u0, c.t, ph);
    FlowParams phh = p;
    phh.dt = ph.dt / 2.0;
    const SpectralField finer = evolve(u0, c.t, phh);
    const double e_coarse = l2_norm(traj.snapshots.back() - finer);
    const double e_fine = l2_norm(fine - finer);
    sum["refinement_ratio"] = e_fine > 0 ? e_coarse / e_fine : 0.0;
  }
  sum["e1_drift"] = rep.e1_drift;
  sum["e3_drift"] = rep.e3_drift;
  sum["e5_drift"] = rep.e5_drift;
  sum["de3_dt0"] = rep.de3_dt0;
  sum["de5_dt0"] = rep.de5_dt0;
  sum["w1inf_time_integral"] = w1inf_time_integral(traj, N);
  if (u0.cutoff() < 3 * N + 1)
    sum["warning"] = "ambient K < 3N+1: nonlinearity truncated at ambient band";
  return sum;
}

// ---- estar ----
json run_estar(const RunConfig& c, int /*workers*/, const fs::path& dir) {
  const int N = first_n(c);
  GaussianSamplerSpec spec{c.n, c.K, c.seed, 0};
  std::ostringstream os;
  os << "sample,analytic3,fd3,diff3,cd3_h,cd3_h2,analytic5,fd5,diff5,ratio3,ratio5\n";
  const long n = std::max<long>(1, c.n_samples);
  double worst3 = 0.0, worst5 = 0.0;
  for (long i = 0; i < n; ++i) {
    const SpectralField u = sample_mu(sub_stream(spec, i));
    const double a3 = e_star(u, 3, N, EStarMethod::analytic);
    const double f3 = e_star(u, 3, N, EStarMethod::finite_difference);
    const double a5 = e_star(u, 5, N, EStarMethod::analytic);
    const double f5 = e_star(u, 5, N, EStarMethod::finite_difference);
    // raw central differences at h and h/2 (stencil-order diagnostic);
    // h is taken well above the Richardson working point so the h^2 term
    // dominates and the halving ratio reads ~4
    const double h1n = sobolev_norm(u, 1.0);
    const double h0 = 2e-3 / (1.0 + h1n * h1n);
    auto central = [&](double h) {
      FlowParams p{N, u.cutoff(), h / 8.0};
      const SpectralField up = evolve(u, h, p);
      const SpectralField um = evolve(u, -h, p);
      auto proj = [&](const SpectralField& w) {
        return energy_explicit(truncated(project_low(w, N), N), 3);
      };
      return (proj(up) - proj(um)) / (2.0 * h);
    };
    const double cdh = central(h0) - a3;
    const double cdh2 = central(h0 / 2.0) - a3;
    worst3 = std::max(worst3, std::abs(a3 - f3) / (1.0 + std::abs(a3)));
    worst5 = std::max(worst5, std::abs(a5 - f5) / (1.0 + std::abs(a5)));
    os << i << ',' << fmt(a3) << ',' << fmt(f3) << ',' << fmt(a3 - f3) << ','
       << fmt(cdh) << ',' << fmt(cdh2) << ',' << fmt(a5) << ',' << fmt(f5) << ','
       << fmt(a5 - f5) << ',' << fmt(f3 != 0 ? a3 / f3 : 0.0) << ','
       << fmt(f5 != 0 ? a5 / f5 : 0.0) << '\n';
  }
  io::write_text_atomic(dir / "estar.csv", os.str());
  json sum;
  sum["max_rel_diff3"] = worst3;
  sum["max_rel_diff5"] = worst5;
  return sum;
}

// ---- decay ----
struct PairSpec {
  FamilyTag family;
  CoefficientKind kind;
};

const std::vector<PairSpec>& decay_pairs() {
  static const std::vector<PairSpec> pairs = {
      {FamilyTag::I0, CoefficientKind::A},
      {FamilyTag::HatI26, CoefficientKind::A},
      {FamilyTag::HatI36, CoefficientKind::A},
      {FamilyTag::I15, CoefficientKind::A},
      {FamilyTag::I24, CoefficientKind::A},
      {FamilyTag::I34, CoefficientKind::A},
      {FamilyTag::I12, CoefficientKind::A},
      {FamilyTag::I13, CoefficientKind::A},
      {FamilyTag::I45, CoefficientKind::A},
      {FamilyTag::I56, CoefficientKind::A},
      {FamilyTag::I0, CoefficientKind::B},
      {FamilyTag::I15, CoefficientKind::B},
      {FamilyTag::I24, CoefficientKind::B},
      {FamilyTag::I34, CoefficientKind::B},
      {FamilyTag::I26, CoefficientKind::B},
      {FamilyTag::I36, CoefficientKind::B},
      {FamilyTag::I12, CoefficientKind::B},
      {FamilyTag::I13, CoefficientKind::B},
      {FamilyTag::I45, CoefficientKind::B},
      {FamilyTag::I56, CoefficientKind::B},
  };
  return pairs;
}

std::string kind_name(CoefficientKind k) {
  switch (k) {
    case CoefficientKind::A: return "A";
    case CoefficientKind::B: return "B";
    case CoefficientKind::C: return "C";
    case CoefficientKind::An: return "An";
  }
  return "?";
}

McEstimate mc_second_moment(int N, FamilyTag f, const Coefficient& c, long n_draws,
                            std::uint64_t seed) {
  const auto members = family_members(N, f);
  std::vector<double> vals(n_draws);
  for (long i = 0; i < n_draws; ++i) {
    GaussianSamplerSpec spec{2, N, seed, 0};
    const auto g = sample_gaussians(sub_stream(spec, i));
    vals[i] = std::norm(pathwise_sum_over(members, c, g, N));
  }
  return fold_samples(vals, seed);
}

json run_decay(const RunConfig& c, int workers, const fs::path& dir) {
  std::ostringstream os;
  os << "N,family,kind,bound,wick,mc_mean,mc_stderr,tilde_im\n";
  json fits = json::array();
  for (const auto& pair : decay_pairs()) {
    const Coefficient coeff{pair.kind, 2};
    std::vector<std::pair<double, double>> pts;
    bool empty_family = true;
    for (int N : c.n_ladder) {
      const double bound = second_moment_bound(N, pair.family, coeff);
      std::string wick = "MC";
      std::string mc_mean, mc_stderr;
      if (N <= 4) {
        try {
          wick = fmt(wick_second_moment(N, pair.family, coeff));
        } catch (const BudgetExceeded&) {
        }
      }
      if (c.n_samples > 0) {
        const McEstimate mc = mc_second_moment(
            N, pair.family, coeff, std::min<long>(c.n_samples, 20000), c.seed);
        mc_mean = fmt(mc.mean);
        mc_stderr = fmt(mc.stderr_);
      }
      double tilde_im = 0.0;
      if (pair.family == FamilyTag::HatI26 && pair.kind == CoefficientKind::A) {
        GaussianSamplerSpec spec{2, N, c.seed, 7};
        const auto g = sample_gaussians(spec);
        const auto t26 = family_members(N, FamilyTag::TildeI26);
        const auto t36 = family_members(N, FamilyTag::TildeI36);
        tilde_im = std::imag(pathwise_sum_over(t26, coeff, g, N)) +
                   std::imag(pathwise_sum_over(t36, coeff, g, N));
      }
      os << N << ',' << family_name(pair.family) << ',' << kind_name(pair.kind)
         << ',' << fmt(bound) << ',' << wick << ',' << mc_mean << ','
         << mc_stderr << ',' << fmt(tilde_im) << '\n';
      if (bound > 0.0) {
        pts.emplace_back(static_cast<double>(N), bound);
        empty_family = false;
      }
    }
    json f;
    f["family"] = family_name(pair.family);
    f["kind"] = kind_name(pair.kind);
    f["points"] = pts.size();
    if (empty_family) {
      f["empty"] = true;
    } else if (pts.size() >= 3) {
      const DecayFit fit = decay_fit(pts);
      f["slope"] = fit.slope;
      f["slope_stderr"] = fit.stderr_;
    }
    fits.push_back(f);
  }
  io::write_text_atomic(dir / "decay.csv", os.str());
  json sum;
  sum["fits"] = fits;
  if (c.n_samples > 0 && !c.n_ladder.empty()) {
    GaussianSamplerSpec spec{2, 3 * c.n_ladder.back() + 1, c.seed, 3};
    for (int j : {3, 5}) {
      const auto series =
          estar_l2_decay(j, c.n_ladder, c.R, spec, c.n_samples, workers);
      json arr = json::array();
      for (const auto& pt : series)
        arr.push_back({{"N", pt.N},
                       {"mean", pt.defect.mean},
                       {"stderr", pt.defect.stderr_}});
      sum[j == 3 ? "estar3_l2" : "estar5_l2"] = arr;
    }
  }
  io::write_text_atomic(dir / "fits.json", sum.dump(2) + "\n");
  return sum;
}

// ---- invariance ----
json run_invariance(const RunConfig& c, int workers, const fs::path& dir) {
  const double s = c.s.empty() ? 1.4 : c.s.front();
  GaussianSamplerSpec spec{c.n, c.K, c.seed, 0};
  double radius = c.radius;
  if (radius <= 0.0) {
    // empirical median of ||u||_{H^s} on a dedicated stream
    GaussianSamplerSpec probe{c.n, c.K, c.seed, 11};
    const long m = std::min<long>(std::max<long>(c.n_samples, 100), 2000);
    std::vector<double> norms(m);
    for (long i = 0; i < m; ++i)
      norms[i] = sobolev_norm(sample_mu(sub_stream(probe, i)), s);
    std::nth_element(norms.begin(), norms.begin() + m / 2, norms.end());
    radius = norms[m / 2];
  }
  FlowParams base{0, 0, c.dt};
  std::ostringstream os;
  os << "label,N,defect_mean,defect_stderr,n_samples\n";
  const int nref = c.n_ladder.empty() ? 8 : c.n_ladder.back();
  {  // control rows: t = 0 and radius = inf are exact zeros sample-by-sample
    const std::vector<int> ladder1{nref};
    auto z1 = almost_invariance(radius, s, 0.0, ladder1, c.n, c.R, spec,
                                std::min<long>(c.n_samples, 200), base, workers);
    os << "t0_control," << nref << ',' << fmt(z1[0].defect.mean) << ','
       << fmt(z1[0].defect.stderr_) << ',' << z1[0].defect.n_samples << '\n';
    auto z2 = almost_invariance(std::numeric_limits<double>::infinity(), s, c.t,
                                ladder1, c.n, c.R, spec,
                                std::min<long>(c.n_samples, 200), base, workers);
    os << "radius_inf_control," << nref << ',' << fmt(z2[0].defect.mean) << ','
       << fmt(z2[0].defect.stderr_) << ',' << z2[0].defect.n_samples << '\n';
  }
  const auto pts = almost_invariance(radius, s, c.t, c.n_ladder, c.n, c.R, spec,
                                     c.n_samples, base, workers);
  json arr = json::array();
  for (const auto& pt : pts) {
    os << "ladder," << pt.N << ',' << fmt(pt.defect.mean) << ','
       << fmt(pt.defect.stderr_) << ',' << pt.defect.n_samples << '\n';
    arr.push_back({{"N", pt.N},
                   {"defect", pt.defect.mean},
                   {"stderr", pt.defect.stderr_},
                   {"flagged", pt.defect.n_flagged}});
  }
  io::write_text_atomic(dir / "invariance.csv", os.str());
  json sum;
  sum["radius"] = radius;
  sum["points"] = arr;
  return sum;
}

// ---- converge ----
json run_converge(const RunConfig& c, int /*workers*/, const fs::path& dir) {
  const SpectralField u0 = make_initial_condition(c);
  std::ostringstream os;
  os << "N,M,gap\n";
  std::vector<std::pair<double, double>> pts;
  for (int N : c.n_ladder) {
    FlowParams p{N, u0.cutoff(), c.dt};
    const double gap = cauchy_gap(u0, N, 2 * N, c.t, p);
    os << N << ',' << 2 * N << ',' << fmt(gap) << '\n';
    if (gap > 0) pts.emplace_back(static_cast<double>(N), gap);
  }
  io::write_text_atomic(dir / "converge.csv", os.str());
  json sum;
  if (pts.size() >= 3) {
    const DecayFit fit = decay_fit(pts);
    sum["slope"] = fit.slope;
    sum["slope_stderr"] = fit.stderr_;
  }
  return sum;
}

}  // namespace

RunResult run_experiment(const RunConfig& config, int workers) {
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  const std::string started = iso_now();
  json summary;
  if (config.experiment == "sample")
    summary = run_sample(config, workers, dir);
  else if (config.experiment == "evolve")
    summary = run_evolve(config, workers, dir);
  else if (config.experiment == "estar")
    summary = run_estar(config, workers, dir);
  else if (config.experiment == "decay")
    summary = run_decay(config, workers, dir);
  else if (config.experiment == "invariance")
    summary = run_invariance(config, workers, dir);
  else if (config.experiment == "converge")
    summary = run_converge(config, workers, dir);
  else
    throw std::invalid_argument("unknown experiment '" + config.experiment + "'");
  json manifest;
  manifest["config"] = config.to_json();
  manifest["started"] = started;
  manifest["finished"] = iso_now();
  manifest["version"] = version_string();
  manifest["resolved_seed"] = config.seed;
  manifest["workers"] = workers;
  manifest["summary"] = summary;
  io::write_text_atomic(dir / "run.json", manifest.dump(2) + "\n");
  return RunResult{summary};
}

}  // namespace mkdv
