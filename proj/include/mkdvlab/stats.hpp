#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace mkdv {

/// Compensated (Kahan) accumulator; reductions over large index families must
/// stay reproducible to ~1e-13 relative under re-partitioning.
class KahanSum {
 public:
  void add(double x) {
    double y = x - comp_;
    double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Monte-Carlo estimate of a scalar functional.
struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  long n_samples = 0;
  std::uint64_t seed = 0;
  long n_flagged = 0;  // non-finite functional values, counted but never dropped silently
};

/// Deterministic fold (in index order) of per-sample values.
McEstimate fold_samples(std::span<const double> values, std::uint64_t seed);

struct DecayFit {
  double slope = 0.0;
  double stderr_ = 0.0;
};

/// Least-squares slope of log y vs log N. Requires >= 3 points, all y > 0.
DecayFit decay_fit(std::span<const std::pair<double, double>> points);

struct WlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double t_stat = 0.0;
};

/// Weighted least squares of y vs x with weights w (1/variance).
WlsFit weighted_linear_fit(std::span<const double> x, std::span<const double> y,
                           std::span<const double> w);

}  // namespace mkdv
