#include "mkdvlab/flow.hpp"

#include <algorithm>
#include <cmath>

#include "mkdvlab/fft.hpp"
#include "mkdvlab/hierarchy.hpp"

namespace mkdv {
namespace {

/// Reusable IFRK4 stepper for one (K, N) pair. Works in the rotating frame
/// w_k(t) = e^{-ik^3 t} u_k(t); the nonlinearity is evaluated on a grid large
/// enough that the cubic term of modes <= N is alias-free.
class Stepper {
 public:
  Stepper(int K, int N) : K_(K), N_(std::min(N, K)), M_(fft::fast_size(4 * N_ + 1)) {
    k3_.resize(2 * K_ + 1);
    for (int k = -K_; k <= K_; ++k)
      k3_[k + K_] = static_cast<double>(k) * k * k;
    grid_v_.resize(M_);
    grid_dv_.resize(M_);
    stage_.assign(5, std::vector<cplx>(2 * K_ + 1));
    phase_.resize(2 * K_ + 1);
  }

  // y: rotating-frame coefficients (length 2K+1). out = e^{-ik^3 tau} NL(e^{ik^3 tau} y),
  // NL(c) = 6 Pi_N(|Pi_N c|^2 d Pi_N c).
  void rhs(const std::vector<cplx>& y, double tau, std::vector<cplx>& out) {
    for (int k = -K_; k <= K_; ++k)
      phase_[k + K_] = std::polar(1.0, k3_[k + K_] * tau);
    std::fill(grid_v_.begin(), grid_v_.end(), cplx{});
    std::fill(grid_dv_.begin(), grid_dv_.end(), cplx{});
    for (int k = -N_; k <= N_; ++k) {
      const cplx c = y[k + K_] * phase_[k + K_];
      const int bin = ((k % M_) + M_) % M_;
      grid_v_[bin] = c;
      grid_dv_[bin] = cplx{0.0, static_cast<double>(k)} * c;
    }
    fft::backward(grid_v_);
    fft::backward(grid_dv_);
    for (int m = 0; m < M_; ++m)
      grid_v_[m] = grid_v_[m] * std::conj(grid_v_[m]) * grid_dv_[m];
    fft::forward(grid_v_);
    const double scale = 6.0 / M_;
    std::fill(out.begin(), out.end(), cplx{});
    for (int k = -N_; k <= N_; ++k)
      out[k + K_] = scale * grid_v_[((k % M_) + M_) % M_] * std::conj(phase_[k + K_]);
  }

  // One RK4 step of size h in the rotating frame, then undo the frame.
  void step(std::vector<cplx>& u, double h) {
    auto& k1 = stage_[0];
    auto& k2 = stage_[1];
    auto& k3 = stage_[2];
    auto& k4 = stage_[3];
    auto& tmp = stage_[4];
    const int n = 2 * K_ + 1;
    rhs(u, 0.0, k1);
    for (int i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
    rhs(tmp, 0.5 * h, k2);
    for (int i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
    rhs(tmp, 0.5 * h, k3);
    for (int i = 0; i < n; ++i) tmp[i] = u[i] + h * k3[i];
    rhs(tmp, h, k4);
    for (int i = 0; i < n; ++i) {
      u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      u[i] *= std::polar(1.0, k3_[i] * h);  // e^{ik^3 h}
    }
  }

 private:
  int K_, N_, M_;
  std::vector<double> k3_;
  std::vector<cplx> grid_v_, grid_dv_, phase_;
  std::vector<std::vector<cplx>> stage_;
};

bool finite_state(const std::vector<cplx>& u) {
  for (const auto& c : u)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

void run_steps(std::vector<cplx>& state, Stepper& st, double t, long nsteps,
               double t_origin) {
  if (nsteps == 0) return;
  const double h = t / static_cast<double>(nsteps);
  for (long s = 0; s < nsteps; ++s) {
    st.step(state, h);
    if (!finite_state(state))
      throw FlowBlowup(t_origin + h * static_cast<double>(s));
  }
}

long step_count(double t, double dt) {
  if (t == 0.0) return 0;
  const double n = std::ceil(std::abs(t) / dt - 1e-12);
  if (n > 1e9) throw std::invalid_argument("evolve: step-count guard exceeded");
  return std::max<long>(1, static_cast<long>(n));
}

double resolve_dt(const SpectralField& u0, const FlowParams& p) {
  return p.dt > 0.0 ? p.dt : default_dt(u0);
}

}  // namespace

double default_dt(const SpectralField& u0) {
  const double h1 = sobolev_norm(u0, 1.0);
  return std::min(1e-2, 0.1 / (1.0 + h1 * h1));
}

SpectralField vector_field(const SpectralField& u, int N) {
  const int K = u.cutoff();
  const SpectralField v = truncated(project_low(u, N), std::min(N, K));
  const SpectralField dv = derivative(v);
  SpectralField nl = dealiased_product({{&v, false}, {&v, true}, {&dv, false}},
                                       std::min(N, K));
  SpectralField out = scaled(derivative(u, 3), cplx{-1.0, 0.0});
  for (int k = -nl.cutoff(); k <= nl.cutoff(); ++k) out[k] += 6.0 * nl[k];
  return out;
}

SpectralField evolve(const SpectralField& u0, double t, const FlowParams& p) {
  if (p.K > 0 && p.K != u0.cutoff())
    throw std::invalid_argument("evolve: params.K != field cutoff");
  if (t == 0.0) return u0;
  const double dt = resolve_dt(u0, p);
  const long nsteps = step_count(t, dt);
  Stepper st(u0.cutoff(), p.N);
  std::vector<cplx> state(u0.coeffs().begin(), u0.coeffs().end());
  run_steps(state, st, t, nsteps, 0.0);
  return SpectralField(u0.cutoff(), std::move(state));
}

SpectralField linear_propagator(const SpectralField& u0, double t) {
  SpectralField out(u0.cutoff());
  for (int k = -u0.cutoff(); k <= u0.cutoff(); ++k)
    out[k] = u0[k] * std::polar(1.0, static_cast<double>(k) * k * k * t);
  return out;
}

namespace {

double e3_star_analytic(const SpectralField& u, int N) {
  const SpectralField v = truncated(project_low(u, N), std::min(N, u.cutoff()));
  const SpectralField dv = derivative(v);
  const int band = 3 * v.cutoff();
  const SpectralField cub =
      dealiased_product({{&v, false}, {&v, true}, {&dv, false}}, band);
  const SpectralField h = project_high(cub, N);
  const SpectralField rest =
      dealiased_product({{&v, false}, {&v, true}, {&v, true}}, band);
  return -24.0 * std::real(integral_of_product(h, rest));
}

double e5_star_analytic(const SpectralField& u, int N) {
  const SpectralField v = truncated(project_low(u, N), std::min(N, u.cutoff()));
  const SpectralField dv = derivative(v);
  const int band = 3 * v.cutoff();
  const SpectralField cub =
      dealiased_product({{&v, false}, {&v, true}, {&dv, false}}, band);
  const SpectralField h = project_high(cub, N);
  const SpectralField dh = derivative(h);

  // -72 Re int h conj(v) |dv|^2
  const SpectralField g1 =
      dealiased_product({{&v, true}, {&dv, false}, {&dv, true}}, band);
  const double t1 = -72.0 * std::real(integral_of_product(h, g1));

  // -24 Re int d(|v|^2) conj(dv) h
  const SpectralField vv = product(v, conj_field(v), 2 * v.cutoff());
  const SpectralField dvv = derivative(vv);
  const SpectralField g2 = dealiased_product({{&dvv, false}, {&dv, true}}, band);
  const double t2 = -24.0 * std::real(integral_of_product(g2, h));

  // -24 Re int d(|v|^2 conj(v)) dh
  const SpectralField q =
      dealiased_product({{&v, false}, {&v, true}, {&v, true}}, band);
  const SpectralField dq = derivative(q);
  const double t3 = -24.0 * std::real(integral_of_product(dq, dh));

  // -72 Re int |v|^4 conj(v) h
  const SpectralField g4 = dealiased_product(
      {{&v, false}, {&v, true}, {&v, false}, {&v, true}, {&v, true}}, band);
  const double t4 = -72.0 * std::real(integral_of_product(g4, h));
  return t1 + t2 + t3 + t4;
}

double ej_of_projection(const SpectralField& u, int j, int N) {
  return energy_explicit(truncated(project_low(u, N), std::min(N, u.cutoff())), j);
}

double e_star_fd(const SpectralField& u, int j, int N) {
  const double h1 = sobolev_norm(u, 1.0);
  const double h0 = 1e-4 / (1.0 + h1 * h1);
  auto diff = [&](double h) {
    FlowParams p;
    p.N = N;
    p.dt = h / 8.0;
    const double ep = ej_of_projection(evolve(u, h, p), j, N);
    const double em = ej_of_projection(evolve(u, -h, p), j, N);
    return (ep - em) / (2.0 * h);
  };
  const double d1 = diff(h0);
  const double d2 = diff(0.5 * h0);
  return (4.0 * d2 - d1) / 3.0;  // one Richardson level
}

}  // namespace

double e_star(const SpectralField& u, int j, int N, EStarMethod method) {
  if (j != 3 && j != 5) throw std::invalid_argument("e_star: j must be 3 or 5");
  if (method == EStarMethod::analytic)
    return j == 3 ? e3_star_analytic(u, N) : e5_star_analytic(u, N);
  return e_star_fd(u, j, N);
}

TrajectoryRecord evolve_trajectory(const SpectralField& u0, double t_final,
                                   int n_records, const FlowParams& p,
                                   std::span<const double> s_values) {
  if (n_records < 1) throw std::invalid_argument("evolve_trajectory: n_records < 1");
  TrajectoryRecord traj;
  for (double s : s_values) traj.hs[s] = {};
  auto record = [&](double t, const SpectralField& u) {
    traj.times.push_back(t);
    traj.snapshots.push_back(u);
    const SpectralField low = truncated(project_low(u, p.N), std::min(p.N, u.cutoff()));
    traj.e1.push_back(energy_explicit(u, 1));
    traj.e3.push_back(energy_explicit(low, 3));
    traj.e5.push_back(energy_explicit(low, 5));
    for (double s : s_values) traj.hs[s].push_back(sobolev_norm(u, s));
  };
  record(0.0, u0);
  if (n_records == 1 || t_final == 0.0) return traj;
  const double dt = resolve_dt(u0, p);
  const double seg = t_final / (n_records - 1);
  Stepper st(u0.cutoff(), p.N);
  std::vector<cplx> state(u0.coeffs().begin(), u0.coeffs().end());
  for (int i = 1; i < n_records; ++i) {
    const long n = step_count(seg, dt);
    run_steps(state, st, seg, n, seg * (i - 1));
    record(seg * i, SpectralField(u0.cutoff(), state));
  }
  return traj;
}

ConservationReport conservation_report(const TrajectoryRecord& traj, int /*N*/) {
  ConservationReport rep;
  auto drift = [](const std::vector<double>& e) {
    if (e.empty()) return 0.0;
    double d = 0.0;
    for (double v : e) d = std::max(d, std::abs(v - e.front()));
    return d / std::max(std::abs(e.front()), 1e-300);
  };
  rep.e1_drift = drift(traj.e1);
  rep.e3_drift = drift(traj.e3);
  rep.e5_drift = drift(traj.e5);
  auto dt0 = [&](const std::vector<double>& e) {
    if (e.size() < 5 || traj.times.size() < 5) return 0.0;
    const double h = traj.times[1] - traj.times[0];
    return (-25.0 * e[0] + 48.0 * e[1] - 36.0 * e[2] + 16.0 * e[3] - 3.0 * e[4]) /
           (12.0 * h);
  };
  rep.de3_dt0 = dt0(traj.e3);
  rep.de5_dt0 = dt0(traj.e5);
  return rep;
}

double divergence_check(const SpectralField& u, int N, double h) {
  if (h <= 0.0) throw std::invalid_argument("divergence_check: h <= 0");
  double acc = 0.0;
  const int top = std::min(N, u.cutoff());
  for (int k = -top; k <= top; ++k) {
    for (int comp = 0; comp < 2; ++comp) {
      SpectralField up = u, um = u;
      if (comp == 0) {
        up[k] += h;
        um[k] -= h;
      } else {
        up[k] += cplx{0.0, h};
        um[k] -= cplx{0.0, h};
      }
      const cplx fp = vector_field(up, N)[k];
      const cplx fm = vector_field(um, N)[k];
      const double dp = comp == 0 ? fp.real() : fp.imag();
      const double dm = comp == 0 ? fm.real() : fm.imag();
      acc += (dp - dm) / (2.0 * h);
    }
  }
  return std::abs(acc);
}

double w1inf_time_integral(const TrajectoryRecord& traj, int N) {
  if (traj.times.size() < 2)
    throw std::invalid_argument("w1inf_time_integral: need >= 2 samples");
  double acc = 0.0;
  double prev = w1inf_norm(truncated(project_low(traj.snapshots[0], N),
                                     std::min(N, traj.snapshots[0].cutoff())));
  for (size_t i = 1; i < traj.times.size(); ++i) {
    const double cur = w1inf_norm(truncated(project_low(traj.snapshots[i], N),
                                            std::min(N, traj.snapshots[i].cutoff())));
    acc += 0.5 * (prev + cur) * (traj.times[i] - traj.times[i - 1]);
    prev = cur;
  }
  return acc;
}

double cauchy_gap(const SpectralField& u0, int N, int M, double t_max,
                  const FlowParams& p, int n_samples_t) {
  if (!(N < M)) throw std::invalid_argument("cauchy_gap: need N < M");
  if (t_max == 0.0) return 0.0;
  const double dt = resolve_dt(u0, p);
  Stepper stN(u0.cutoff(), N), stM(u0.cutoff(), M);
  std::vector<cplx> a(u0.coeffs().begin(), u0.coeffs().end());
  std::vector<cplx> b = a;
  const double seg = t_max / n_samples_t;
  double sup = 0.0;
  for (int i = 1; i <= n_samples_t; ++i) {
    const long n = step_count(seg, dt);
    run_steps(a, stN, seg, n, seg * (i - 1));
    run_steps(b, stM, seg, n, seg * (i - 1));
    double s = 0.0;
    for (size_t q = 0; q < a.size(); ++q) s += std::norm(a[q] - b[q]);
    sup = std::max(sup, std::sqrt(kTwoPi * s));
  }
  return sup;
}

}  // namespace mkdv
