#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mkdvlab/field.hpp"
#include "mkdvlab/flow.hpp"
#include "mkdvlab/stats.hpp"

namespace mkdv {

/// Law of the random Fourier series sum_j g_j / sqrt(2*pi*(1+j^{2n})) e^{ijx},
/// g_j i.i.d. standard complex gaussians (E g = 0, E|g|^2 = 1). Identical
/// (seed, stream_id, K, n) reproduce bit-identical samples.
struct GaussianSamplerSpec {
  int n = 2;
  int K = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

SpectralField sample_mu(const GaussianSamplerSpec& spec);

/// Raw gaussian vector g_{-K}..g_{K} of the same draw (used by the pairing sums).
std::vector<cplx> sample_gaussians(const GaussianSamplerSpec& spec);

/// Derived per-sample stream; estimates must not depend on worker count.
GaussianSamplerSpec sub_stream(const GaussianSamplerSpec& spec, std::uint64_t index);

/// The fixed smooth bump: 1 on |x|<=1, exp(1 - 1/(1-(|x|-1)^2)) on 1<|x|<2,
/// 0 on |x|>=2.
double chi(double x);
double chi_prime(double x);

struct CutoffSpec {
  double R = 1.0;
};

/// chi(x/R), or its derivative chi'(x/R)/R when derivative is set.
double chi_r(double x, const CutoffSpec& c, bool derivative = false);

/// F_{n,R,N}(u) = prod_{l=0}^{n-1} chi_R(E_{2l+1}(Pi_N u)) * exp(-R_n(Pi_N u)).
/// Returns exactly 0 when any cutoff factor vanishes (exp not evaluated).
double weighted_density(const SpectralField& u, int n, double R, int N);

using FieldFunctional = std::function<double(const SpectralField&)>;

McEstimate mc_expectation(const FieldFunctional& functional,
                          const GaussianSamplerSpec& spec, long n_samples,
                          int workers = 1);

struct TailPoint {
  double threshold = 0.0;
  McEstimate prob;
  bool used_in_fit = false;
};

struct TailReport {
  std::vector<TailPoint> points;
  double slope = 0.0;          // of log P vs M^2 (weighted)
  double slope_stderr = 0.0;
  double t_stat = 0.0;
};

/// Empirical exceedance probabilities of ||u||_{H^s} with a gaussian-tail fit.
TailReport tail_probability(const GaussianSamplerSpec& spec, double s,
                            std::span<const double> thresholds, long n_samples,
                            int workers = 1);

struct InvariancePoint {
  int N = 0;
  McEstimate defect;
};

/// Monte-Carlo surrogate of |rho_{n,R,N}(Phi_N(t)A) - rho_{n,R,N}(A)| for
/// A = centered H^s ball: averages F_{n,R,N}(u) * [1_A(Phi_N(-t)u) - 1_A(u)].
/// Aborts when more than 0.1% of samples hit a flow blow-up.
std::vector<InvariancePoint> almost_invariance(
    double radius, double s, double t, std::span<const int> n_ladder, int n,
    double R, const GaussianSamplerSpec& spec, long n_samples,
    const FlowParams& base, int workers = 1);

/// Deterministic parallel map: values[i] = f(i), computed on `workers` threads,
/// folded in index order by the callers.
void parallel_index_map(long count, int workers,
                        const std::function<double(long)>& f,
                        std::vector<double>& out);

}  // namespace mkdv
