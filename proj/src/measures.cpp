#include "mkdvlab/measures.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "mkdvlab/hierarchy.hpp"
#include "mkdvlab/rng.hpp"

namespace mkdv {

std::vector<cplx> sample_gaussians(const GaussianSamplerSpec& spec) {
  GaussianStream g(spec.seed, spec.stream_id);
  std::vector<cplx> out(2 * spec.K + 1);
  for (auto& z : out) z = g.next_complex();
  return out;
}

SpectralField sample_mu(const GaussianSamplerSpec& spec) {
  GaussianStream g(spec.seed, spec.stream_id);
  SpectralField u(spec.K);
  for (int j = -spec.K; j <= spec.K; ++j) {
    const double w = std::sqrt(kTwoPi * (1.0 + std::pow(static_cast<double>(j),
                                                        2.0 * spec.n)));
    u[j] = g.next_complex() / w;
  }
  return u;
}

GaussianSamplerSpec sub_stream(const GaussianSamplerSpec& spec, std::uint64_t index) {
  GaussianSamplerSpec s = spec;
  s.stream_id = mix64(spec.stream_id ^ mix64(index + 0x51ed270b6dd7bbddULL));
  return s;
}

double chi(double x) {
  const double a = std::abs(x);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double q = (a - 1.0) * (a - 1.0);
  return std::exp(1.0 - 1.0 / (1.0 - q));
}

double chi_prime(double x) {
  const double a = std::abs(x);
  if (a <= 1.0 || a >= 2.0) return 0.0;
  const double d = a - 1.0;
  const double denom = 1.0 - d * d;
  const double v = std::exp(1.0 - 1.0 / denom);
  const double dv = -2.0 * d / (denom * denom) * v;
  return x < 0.0 ? -dv : dv;
}

double chi_r(double x, const CutoffSpec& c, bool derivative) {
  if (c.R <= 0.0) throw std::invalid_argument("chi_r: R <= 0");
  return derivative ? chi_prime(x / c.R) / c.R : chi(x / c.R);
}

double weighted_density(const SpectralField& u, int n, double R, int N) {
  if (n < 2) throw std::invalid_argument("weighted_density: n < 2");
  const SpectralField v = truncated(project_low(u, N), std::min(N, u.cutoff()));
  const CutoffSpec c{R};
  HierarchySequence seq = w_sequence(v, 2 * n + 1);
  double prod = 1.0;
  for (int l = 0; l <= n - 1; ++l) {
    const double e = std::real(l2_inner(seq.at(2 * l + 1), v));
    prod *= chi_r(e, c, false);
    if (prod == 0.0) return 0.0;  // exp never evaluated on rough fields
  }
  const double rn = std::real(l2_inner(seq.at(2 * n + 1), v)) - quadratic_part(v, n);
  return prod * std::exp(-rn);
}

void parallel_index_map(long count, int workers,
                        const std::function<double(long)>& f,
                        std::vector<double>& out) {
  out.assign(count, 0.0);
  workers = std::max(1, workers);
  if (workers == 1) {
    for (long i = 0; i < count; ++i) out[i] = f(i);
    return;
  }
  std::atomic<long> next{0};
  auto body = [&] {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= count) return;
      out[i] = f(i);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
}

McEstimate mc_expectation(const FieldFunctional& functional,
                          const GaussianSamplerSpec& spec, long n_samples,
                          int workers) {
  if (n_samples < 2) throw std::invalid_argument("mc_expectation: n_samples < 2");
  std::vector<double> values;
  parallel_index_map(
      n_samples, workers,
      [&](long i) { return functional(sample_mu(sub_stream(spec, i))); }, values);
  return fold_samples(values, spec.seed);
}

TailReport tail_probability(const GaussianSamplerSpec& spec, double s,
                            std::span<const double> thresholds, long n_samples,
                            int workers) {
  if (!(s < spec.n - 0.5))
    throw std::invalid_argument("tail_probability: need s < n - 1/2");
  std::vector<double> norms;
  parallel_index_map(
      n_samples, workers,
      [&](long i) { return sobolev_norm(sample_mu(sub_stream(spec, i)), s); },
      norms);
  TailReport rep;
  std::vector<double> x, y, w;
  for (double m : thresholds) {
    long exceed = 0;
    for (double v : norms)
      if (v > m) ++exceed;
    TailPoint pt;
    pt.threshold = m;
    const double p = static_cast<double>(exceed) / n_samples;
    pt.prob.mean = p;
    pt.prob.stderr_ = std::sqrt(std::max(p * (1.0 - p), 0.0) / n_samples);
    pt.prob.n_samples = n_samples;
    pt.prob.seed = spec.seed;
    // points with too few exceedances cannot support a log fit
    pt.used_in_fit = exceed >= 5 && p < 1.0;
    if (pt.used_in_fit) {
      x.push_back(m * m);
      y.push_back(std::log(p));
      const double sigma_log = pt.prob.stderr_ / p;
      w.push_back(1.0 / (sigma_log * sigma_log));
    }
    rep.points.push_back(pt);
  }
  if (x.size() >= 2) {
    const WlsFit fit = weighted_linear_fit(x, y, w);
    rep.slope = fit.slope;
    rep.slope_stderr = fit.slope_stderr;
    rep.t_stat = fit.t_stat;
  }
  return rep;
}

std::vector<InvariancePoint> almost_invariance(
    double radius, double s, double t, std::span<const int> n_ladder, int n,
    double R, const GaussianSamplerSpec& spec, long n_samples,
    const FlowParams& base, int workers) {
  std::vector<InvariancePoint> out;
  std::atomic<long> blowups{0};
  for (int N : n_ladder) {
    std::vector<double> values;
    parallel_index_map(
        n_samples, workers,
        [&](long i) -> double {
          const SpectralField u = sample_mu(sub_stream(spec, i));
          const double w = weighted_density(u, n, R, N);
          const bool in_now =
              std::isinf(radius) ? true : sobolev_norm(u, s) <= radius;
          bool in_back = in_now;  // the time-0 flow is the identity
          if (t != 0.0 && !std::isinf(radius)) {
            FlowParams p = base;
            p.N = N;
            p.K = 0;
            try {
              const SpectralField back = evolve(u, -t, p);
              in_back = sobolev_norm(back, s) <= radius;
            } catch (const FlowBlowup&) {
              blowups.fetch_add(1);
              return std::nan("");
            }
          }
          return w * ((in_back ? 1.0 : 0.0) - (in_now ? 1.0 : 0.0));
        },
        values);
    InvariancePoint pt;
    pt.N = N;
    pt.defect = fold_samples(values, spec.seed);
    out.push_back(pt);
    if (blowups.load() * 1000 > n_samples)
      throw std::runtime_error("almost_invariance: >0.1% of samples blew up");
  }
  return out;
}

}  // namespace mkdv
