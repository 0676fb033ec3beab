#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mkdvlab/field.hpp"

namespace mkdv {

/// Parameters of the truncated flow: du/dt = -d^3 u + 6 Pi_N(|Pi_N u|^2 d Pi_N u).
/// Modes above N evolve with the exact linear phase e^{ik^3 t}; the cubic term
/// of modes <= N produces frequencies up to 3N, so K >= 3N+1 keeps the
/// high-band source representable in diagnostics.
struct FlowParams {
  int N = 0;
  int K = 0;          // ambient cutoff; 0 means "take it from the initial field"
  double dt = 0.0;    // <= 0 means the default min(1e-2, 0.1/(1+||u0||_{H1}^2))
  std::string integrator = "IFRK4";
};

double default_dt(const SpectralField& u0);

struct FlowBlowup : std::runtime_error {
  explicit FlowBlowup(double t)
      : std::runtime_error("flow blow-up, last good time " + std::to_string(t)),
        last_good_time(t) {}
  double last_good_time;
};

/// Right-hand side -d^3 u + 6 Pi_N(|Pi_N u|^2 d Pi_N u), dealiased.
SpectralField vector_field(const SpectralField& u, int N);

/// Integrating-factor RK4 approximation of Phi_N(t) u0 (exact e^{ik^3 t} phases).
SpectralField evolve(const SpectralField& u0, double t, const FlowParams& p);

/// Linear KdV propagator W(t): coefficient k multiplied by e^{ik^3 t}. Exact.
SpectralField linear_propagator(const SpectralField& u0, double t);

enum class EStarMethod { analytic, finite_difference };

/// d/dt E_j(Pi_N Phi_N(t) u)|_{t=0} for j in {3,5}: either the closed forms
/// (-24 Re int Pi_{>N}(|u_N|^2 du_N) conj(u_N) |u_N|^2 for j=3; the four
/// surviving terms with constants -72/-24/-24/-72 for j=5), or a Richardson-
/// extrapolated central difference through the actual flow.
double e_star(const SpectralField& u, int j, int N, EStarMethod method);

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<SpectralField> snapshots;
  std::vector<double> e1;  // E_1 of the full state (conserved along Phi_N)
  std::vector<double> e3;  // E_3 of Pi_N u (drift = time integral of E*_{3,N})
  std::vector<double> e5;  // E_5 of Pi_N u
  std::map<double, std::vector<double>> hs;  // s -> ||u||_{H^s} series
};

TrajectoryRecord evolve_trajectory(const SpectralField& u0, double t_final,
                                   int n_records, const FlowParams& p,
                                   std::span<const double> s_values = {});

struct ConservationReport {
  double e1_drift = 0.0;  // max relative drift
  double e3_drift = 0.0;
  double e5_drift = 0.0;
  double de3_dt0 = 0.0;   // one-sided 4th-order stencil at t = 0
  double de5_dt0 = 0.0;
};
ConservationReport conservation_report(const TrajectoryRecord& traj, int N);

/// |divergence| of the truncated vector field over the 2(2N+1) real
/// coordinates of modes |k| <= N, by central differences; Liouville says ~0.
double divergence_check(const SpectralField& u, int N, double h);

/// Trapezoidal estimate of int ||Pi_N u(t)||_{W^{1,inf}} dt along the trajectory.
double w1inf_time_integral(const TrajectoryRecord& traj, int N);

/// sup over sampled times in [0, t_max] of ||Phi_N(t)u0 - Phi_M(t)u0||_{L2}.
double cauchy_gap(const SpectralField& u0, int N, int M, double t_max,
                  const FlowParams& p, int n_samples_t = 32);

}  // namespace mkdv
