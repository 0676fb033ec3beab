#include "mkdvlab/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mkdv::io {

json field_to_json(const SpectralField& u) {
  json j;
  j["K"] = u.cutoff();
  json arr = json::array();
  for (int k = -u.cutoff(); k <= u.cutoff(); ++k)
    arr.push_back({u[k].real(), u[k].imag()});
  j["coeffs"] = std::move(arr);
  return j;
}

SpectralField field_from_json(const json& j) {
  const int K = j.at("K").get<int>();
  const auto& arr = j.at("coeffs");
  if (static_cast<int>(arr.size()) != 2 * K + 1)
    throw std::invalid_argument("field_from_json: coeff count != 2K+1");
  SpectralField u(K);
  for (int i = 0; i < static_cast<int>(arr.size()); ++i)
    u[i - K] = cplx{arr[i][0].get<double>(), arr[i][1].get<double>()};
  return u;
}

void save_field(const SpectralField& u, const std::filesystem::path& path) {
  write_text_atomic(path, field_to_json(u).dump(2) + "\n");
}

SpectralField load_field(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_field: cannot open " + path.string());
  json j;
  in >> j;
  return field_from_json(j);
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void write_grid_csv(const GridEvaluation& g, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "x,re_u,im_u\n";
  for (int m = 0; m < g.num_points; ++m) {
    const double x = kTwoPi * m / g.num_points;
    os << fmt(x) << ',' << fmt(g.values[m].real()) << ',' << fmt(g.values[m].imag())
       << '\n';
  }
  write_text_atomic(path, os.str());
}

void write_trajectory_csv(const TrajectoryRecord& traj,
                          const std::filesystem::path& path) {
  std::ostringstream os;
  os << "t,E1,E3,E5";
  for (const auto& [s, series] : traj.hs) os << ",Hs_" << s;
  os << '\n';
  for (size_t i = 0; i < traj.times.size(); ++i) {
    os << fmt(traj.times[i]) << ',' << fmt(traj.e1[i]) << ',' << fmt(traj.e3[i])
       << ',' << fmt(traj.e5[i]);
    for (const auto& [s, series] : traj.hs) os << ',' << fmt(series[i]);
    os << '\n';
  }
  write_text_atomic(path, os.str());
}

json energy_report_to_json(const EnergyReport& rep) {
  json j;
  j["n"] = rep.n;
  j["energies"] = rep.energies;
  j["quadratic"] = rep.quadratic;
  j["remainder"] = rep.remainder;
  j["im_defect"] = rep.im_defect;
  return j;
}

std::string energy_report_csv_row(const EnergyReport& rep) {
  std::ostringstream os;
  for (size_t i = 0; i < rep.energies.size(); ++i) {
    if (i) os << ',';
    os << fmt(rep.energies[i]);
  }
  os << ',' << fmt(rep.remainder);
  return os.str();
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path().empty()
                                          ? std::filesystem::path(".")
                                          : path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace mkdv::io
