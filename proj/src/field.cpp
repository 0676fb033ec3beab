#include "mkdvlab/field.hpp"

#include <algorithm>
#include <cmath>

#include "mkdvlab/fft.hpp"

namespace mkdv {

SpectralField project_low(const SpectralField& u, int N) {
  if (N < 0) throw std::invalid_argument("project_low: N < 0");
  SpectralField out(u.cutoff());
  const int top = std::min(N, u.cutoff());
  for (int k = -top; k <= top; ++k) out[k] = u[k];
  return out;
}

SpectralField project_high(const SpectralField& u, int N) {
  SpectralField out = u;
  const int top = std::min(N, u.cutoff());
  for (int k = -top; k <= top; ++k) out[k] = cplx{};
  return out;
}

SpectralField derivative(const SpectralField& u, int order) {
  SpectralField out(u.cutoff());
  for (int k = -u.cutoff(); k <= u.cutoff(); ++k) {
    cplx mult{1.0, 0.0};
    for (int r = 0; r < order; ++r) mult *= cplx{0.0, static_cast<double>(k)};
    out[k] = mult * u[k];
  }
  return out;
}

SpectralField bessel_multiplier(const SpectralField& u, double s) {
  SpectralField out(u.cutoff());
  for (int k = -u.cutoff(); k <= u.cutoff(); ++k)
    out[k] = std::pow(1.0 + static_cast<double>(k) * k, s / 2.0) * u[k];
  return out;
}

SpectralField conj_field(const SpectralField& u) {
  SpectralField out(u.cutoff());
  for (int k = -u.cutoff(); k <= u.cutoff(); ++k) out[k] = std::conj(u[-k]);
  return out;
}

SpectralField scaled(const SpectralField& u, cplx factor) {
  SpectralField out = u;
  for (auto& c : out.coeffs()) c *= factor;
  return out;
}

SpectralField padded(const SpectralField& u, int cutoff) {
  if (cutoff < u.cutoff()) throw std::invalid_argument("padded: cutoff shrinks band");
  SpectralField out(cutoff);
  for (int k = -u.cutoff(); k <= u.cutoff(); ++k) out[k] = u[k];
  return out;
}

SpectralField truncated(const SpectralField& u, int cutoff) {
  SpectralField out(cutoff);
  const int top = std::min(cutoff, u.cutoff());
  for (int k = -top; k <= top; ++k) out[k] = u[k];
  return out;
}

SpectralField operator+(const SpectralField& a, const SpectralField& b) {
  const int K = std::max(a.cutoff(), b.cutoff());
  SpectralField out(K);
  for (int k = -K; k <= K; ++k) out[k] = a.at_or_zero(k) + b.at_or_zero(k);
  return out;
}

SpectralField operator-(const SpectralField& a, const SpectralField& b) {
  const int K = std::max(a.cutoff(), b.cutoff());
  SpectralField out(K);
  for (int k = -K; k <= K; ++k) out[k] = a.at_or_zero(k) - b.at_or_zero(k);
  return out;
}

cplx integrate(const SpectralField& u) { return kTwoPi * u[0]; }

cplx integral_of_product(const SpectralField& a, const SpectralField& b) {
  const int top = std::min(a.cutoff(), b.cutoff());
  cplx sum{}, comp{};
  for (int k = -top; k <= top; ++k) {
    // Kahan step; the pairing identities need stable reassociation.
    cplx y = a[k] * b[-k] - comp;
    cplx t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return kTwoPi * sum;
}

cplx l2_inner(const SpectralField& a, const SpectralField& b) {
  const int top = std::min(a.cutoff(), b.cutoff());
  cplx sum{}, comp{};
  for (int k = -top; k <= top; ++k) {
    cplx y = a[k] * std::conj(b[k]) - comp;
    cplx t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return kTwoPi * sum;
}

double l2_norm(const SpectralField& u) {
  double s = 0.0;
  for (const auto& c : u.coeffs()) s += std::norm(c);
  return std::sqrt(kTwoPi * s);
}

double sobolev_norm(const SpectralField& u, double s) {
  double acc = 0.0;
  for (int k = -u.cutoff(); k <= u.cutoff(); ++k)
    acc += std::pow(1.0 + static_cast<double>(k) * k, s) * std::norm(u[k]);
  return std::sqrt(kTwoPi * acc);
}

double w1inf_norm(const SpectralField& u) {
  const int M = fft::fast_size(std::max({8 * u.cutoff(), 2 * u.cutoff() + 1, 16}));
  GridEvaluation gu = to_grid(u, M);
  GridEvaluation gdu = to_grid(derivative(u), M);
  double mu = 0.0, mdu = 0.0;
  for (int m = 0; m < M; ++m) {
    mu = std::max(mu, std::abs(gu.values[m]));
    mdu = std::max(mdu, std::abs(gdu.values[m]));
  }
  return mu + mdu;
}

GridEvaluation to_grid(const SpectralField& u, int M) {
  if (M < 2 * u.cutoff() + 1)
    throw std::invalid_argument("to_grid: grid too small for the band");
  GridEvaluation g;
  g.num_points = M;
  g.values.assign(M, cplx{});
  for (int k = -u.cutoff(); k <= u.cutoff(); ++k)
    g.values[((k % M) + M) % M] = u[k];
  fft::backward(g.values);
  return g;
}

SpectralField from_grid(const GridEvaluation& g, int K) {
  if (g.num_points < 2 * K + 1)
    throw std::invalid_argument("from_grid: grid too small for requested band");
  std::vector<cplx> buf = g.values;
  fft::forward(buf);
  const double inv = 1.0 / g.num_points;
  SpectralField out(K);
  for (int k = -K; k <= K; ++k)
    out[k] = buf[((k % g.num_points) + g.num_points) % g.num_points] * inv;
  return out;
}

SpectralField dealiased_product(const std::vector<FactorRef>& factors, int result_cutoff) {
  if (factors.empty()) throw std::invalid_argument("dealiased_product: no factors");
  if (result_cutoff < 0) throw std::invalid_argument("dealiased_product: negative cutoff");
  int degree = 0, kmax = 0;
  for (const auto& f : factors) {
    degree += f.field->cutoff();
    kmax = std::max(kmax, f.field->cutoff());
  }
  const int M = fft::fast_size(std::max(degree + result_cutoff + 1, 2 * kmax + 1));
  std::vector<cplx> acc(M, cplx{1.0, 0.0});
  std::vector<cplx> buf(M);
  for (const auto& f : factors) {
    std::fill(buf.begin(), buf.end(), cplx{});
    const auto& u = *f.field;
    for (int k = -u.cutoff(); k <= u.cutoff(); ++k)
      buf[((k % M) + M) % M] = u[k];
    fft::backward(buf);
    if (f.conjugated)
      for (int m = 0; m < M; ++m) acc[m] *= std::conj(buf[m]);
    else
      for (int m = 0; m < M; ++m) acc[m] *= buf[m];
  }
  fft::forward(acc);
  const double inv = 1.0 / M;
  SpectralField out(result_cutoff);
  for (int k = -result_cutoff; k <= result_cutoff; ++k)
    out[k] = acc[((k % M) + M) % M] * inv;
  return out;
}

SpectralField product(const SpectralField& a, const SpectralField& b, int result_cutoff) {
  return dealiased_product({{&a, false}, {&b, false}}, result_cutoff);
}

}  // namespace mkdv
