#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace mkdv {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 6.28318530717958647692528676655900577;

/// Band-limited complex function on the 2pi-torus, stored as Fourier
/// coefficients for modes k in [-K, K] so that u(x) = sum_k c_k e^{ikx}.
/// No Hermitian symmetry is imposed; the field is genuinely complex valued.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(int cutoff) : cutoff_(cutoff), coeffs_(2 * cutoff + 1) {
    if (cutoff < 0) throw std::invalid_argument("SpectralField: negative cutoff");
  }
  SpectralField(int cutoff, std::vector<cplx> coeffs)
      : cutoff_(cutoff), coeffs_(std::move(coeffs)) {
    if (static_cast<int>(coeffs_.size()) != 2 * cutoff_ + 1)
      throw std::invalid_argument("SpectralField: coeff count != 2K+1");
  }

  int cutoff() const { return cutoff_; }
  int size() const { return 2 * cutoff_ + 1; }

  cplx& operator[](int k) { return coeffs_[k + cutoff_]; }
  const cplx& operator[](int k) const { return coeffs_[k + cutoff_]; }
  cplx at_or_zero(int k) const {
    return (k < -cutoff_ || k > cutoff_) ? cplx{} : coeffs_[k + cutoff_];
  }

  std::span<const cplx> coeffs() const { return coeffs_; }
  std::span<cplx> coeffs() { return coeffs_; }

 private:
  int cutoff_ = 0;
  std::vector<cplx> coeffs_{cplx{}};
};

/// Point values u(x_m) at x_m = 2*pi*m/M, m = 0..M-1.
struct GridEvaluation {
  int num_points = 0;
  std::vector<cplx> values;
};

// -- projectors and multipliers (coefficient-exact) --

SpectralField project_low(const SpectralField& u, int N);
SpectralField project_high(const SpectralField& u, int N);
SpectralField derivative(const SpectralField& u, int order = 1);
SpectralField bessel_multiplier(const SpectralField& u, double s);
SpectralField conj_field(const SpectralField& u);
SpectralField scaled(const SpectralField& u, cplx factor);
SpectralField padded(const SpectralField& u, int cutoff);  // embed into a wider band
SpectralField truncated(const SpectralField& u, int cutoff);  // drop modes outside |k| <= cutoff
SpectralField operator+(const SpectralField& a, const SpectralField& b);
SpectralField operator-(const SpectralField& a, const SpectralField& b);

// -- quadrature-exact functionals --

/// integral over the torus: 2*pi*c_0.
cplx integrate(const SpectralField& u);
/// integral of a*b (no conjugation): 2*pi * sum_k a_k b_{-k}.
cplx integral_of_product(const SpectralField& a, const SpectralField& b);
/// L2 pairing int a * conj(b) = 2*pi * sum_k a_k conj(b_k).
cplx l2_inner(const SpectralField& a, const SpectralField& b);
double l2_norm(const SpectralField& u);
double sobolev_norm(const SpectralField& u, double s);

/// max|u| + max|du| on an oversampled grid (>= 8K points); a lower bound of
/// the true sup norms within the oversampling error.
double w1inf_norm(const SpectralField& u);

// -- grids and dealiased products --

GridEvaluation to_grid(const SpectralField& u, int num_points);
SpectralField from_grid(const GridEvaluation& g, int cutoff);

struct FactorRef {
  const SpectralField* field = nullptr;
  bool conjugated = false;
};

/// Exact Fourier coefficients of the pointwise product of the factors
/// (each optionally conjugated), truncated to |k| <= result_cutoff. The grid
/// is sized from the total trigonometric degree so no aliasing occurs.
SpectralField dealiased_product(const std::vector<FactorRef>& factors, int result_cutoff);

/// Convenience binary product.
SpectralField product(const SpectralField& a, const SpectralField& b, int result_cutoff);

}  // namespace mkdv
