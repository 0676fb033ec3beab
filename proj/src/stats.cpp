#include "mkdvlab/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace mkdv {

McEstimate fold_samples(std::span<const double> values, std::uint64_t seed) {
  McEstimate est;
  est.seed = seed;
  KahanSum sum;
  long n = 0;
  for (double v : values) {
    if (!std::isfinite(v)) {
      ++est.n_flagged;
      continue;
    }
    sum.add(v);
    ++n;
  }
  est.n_samples = n;
  if (n == 0) return est;
  est.mean = sum.value() / n;
  KahanSum sq;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    const double d = v - est.mean;
    sq.add(d * d);
  }
  if (n > 1) est.stderr_ = std::sqrt(sq.value() / (n - 1) / n);
  return est;
}

DecayFit decay_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw std::invalid_argument("decay_fit: need >= 3 points");
  std::vector<double> x, y;
  for (auto [n, v] : points) {
    if (v <= 0.0) throw std::invalid_argument("decay_fit: nonpositive value");
    x.push_back(std::log(n));
    y.push_back(std::log(v));
  }
  const auto m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
  }
  const double denom = m * sxx - sx * sx;
  DecayFit fit;
  fit.slope = (m * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.slope * sx) / m;
  double rss = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + fit.slope * x[i]);
    rss += r * r;
  }
  if (x.size() > 2) fit.stderr_ = std::sqrt(rss / (m - 2) * (m / denom));
  return fit;
}

WlsFit weighted_linear_fit(std::span<const double> x, std::span<const double> y,
                           std::span<const double> w) {
  if (x.size() != y.size() || x.size() != w.size() || x.size() < 2)
    throw std::invalid_argument("weighted_linear_fit: bad inputs");
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sw += w[i]; swx += w[i] * x[i]; swy += w[i] * y[i];
    swxx += w[i] * x[i] * x[i]; swxy += w[i] * x[i] * y[i];
  }
  const double denom = sw * swxx - swx * swx;
  WlsFit fit;
  fit.slope = (sw * swxy - swx * swy) / denom;
  fit.intercept = (swy - fit.slope * swx) / sw;
  fit.slope_stderr = std::sqrt(sw / denom);
  if (fit.slope_stderr > 0) fit.t_stat = fit.slope / fit.slope_stderr;
  return fit;
}

}  // namespace mkdv
