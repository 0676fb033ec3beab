#include "mkdvlab/hierarchy.hpp"

#include <cmath>
#include <stdexcept>

namespace mkdv {
namespace {

const cplx kMinusI{0.0, -1.0};

double re_pair(const SpectralField& a, const SpectralField& b) {
  // Re int conj(a) b
  return std::real(l2_inner(b, a));
}

}  // namespace

HierarchySequence w_sequence(const SpectralField& u, int n_max) {
  if (n_max < 1) throw std::invalid_argument("w_sequence: n_max < 1");
  HierarchySequence seq;
  seq.base = u;
  seq.w.reserve(n_max);
  seq.w.push_back(u);
  const SpectralField ub = conj_field(u);
  for (int j = 1; j < n_max; ++j) {
    // w_{j+1} = -i d w_j + conj(u) * sum_{k=1}^{j-1} w_k w_{j-k}
    SpectralField next = scaled(derivative(seq.w[j - 1]), kMinusI);
    if (j >= 2) {
      const int deg = (j + 1) * u.cutoff();  // crude but alias-free bound
      SpectralField cubic(deg);
      for (int k = 1; k <= j - 1; ++k) {
        const SpectralField& wk = seq.w[k - 1];
        const SpectralField& wjk = seq.w[j - k - 1];
        cubic = cubic + dealiased_product({{&ub, false}, {&wk, false}, {&wjk, false}}, deg);
      }
      next = next + cubic;
    }
    seq.w.push_back(std::move(next));
  }
  return seq;
}

double energy(const SpectralField& u, int n) {
  if (n < 1) throw std::invalid_argument("energy: n < 1");
  HierarchySequence seq = w_sequence(u, n);
  return re_pair(u, seq.at(n));
}

double energy_im_defect(const SpectralField& u, int n) {
  HierarchySequence seq = w_sequence(u, n);
  return std::imag(l2_inner(seq.at(n), u));
}

double energy_explicit(const SpectralField& u, int n) {
  const int K = u.cutoff();
  const SpectralField du = derivative(u);
  switch (n) {
    case 1:
      return std::real(l2_inner(u, u));
    case 2:
      return std::imag(l2_inner(du, u));  // Im int conj(u) du
    case 3: {
      const SpectralField d2 = product(u, conj_field(u), 2 * K);  // |u|^2
      return std::real(l2_inner(du, du)) + std::real(l2_inner(d2, d2));
    }
    case 4: {
      const SpectralField d2u = derivative(u, 2);
      // Im int (du * conj(d2u) + 3 |u|^2 u conj(du))
      const cplx t1 = l2_inner(du, d2u);
      const SpectralField cb = dealiased_product(
          {{&u, false}, {&u, true}, {&u, false}, {&du, true}}, 0);
      return std::imag(t1) + 3.0 * std::imag(integrate(cb));
    }
    case 5: {
      const SpectralField d2u = derivative(u, 2);
      const SpectralField uu = product(u, conj_field(u), 2 * K);    // |u|^2
      const SpectralField dudu = product(du, conj_field(du), 2 * K);  // |du|^2
      const SpectralField duu = derivative(uu);                       // d(|u|^2)
      const double t1 = std::real(l2_inner(d2u, d2u));
      const double t2 = 6.0 * std::real(l2_inner(dudu, uu));
      const double t3 = std::real(l2_inner(duu, duu));
      const double t4 = 2.0 * std::real(l2_inner(product(uu, uu, 4 * K), uu));
      return t1 + t2 + t3 + t4;
    }
    default:
      throw std::invalid_argument("energy_explicit: n must be 1..5");
  }
}

double quadratic_part(const SpectralField& u, int n) {
  double acc = 0.0;
  for (int k = -u.cutoff(); k <= u.cutoff(); ++k)
    acc += std::pow(static_cast<double>(k) * k, n) * std::norm(u[k]);
  return kTwoPi * acc;
}

double remainder(const SpectralField& u, int n) {
  if (n < 2) throw std::invalid_argument("remainder: n < 2");
  return energy(u, 2 * n + 1) - quadratic_part(u, n);
}

LeadingParts leading_parts(const SpectralField& u, int n) {
  if (n < 2) throw std::invalid_argument("leading_parts: n < 2");
  const int K = u.cutoff();
  LeadingParts parts;
  parts.quadratic = quadratic_part(u, n);
  const SpectralField uu = product(u, conj_field(u), 2 * K);
  const SpectralField dn1uu = derivative(uu, n - 1);  // d^{n-1}(|u|^2)
  const SpectralField dn1u = derivative(u, n - 1);
  const SpectralField dd = product(dn1u, conj_field(dn1u), 2 * K);  // |d^{n-1}u|^2
  parts.quartic_leading = std::real(l2_inner(dn1uu, dn1uu)) +
                          (4.0 * n - 2.0) * std::real(l2_inner(dd, uu));
  parts.residual = energy(u, 2 * n + 1) - parts.quadratic - parts.quartic_leading;
  return parts;
}

double homogeneous_component(const SpectralField& u, int n, int degree) {
  const int dmax = 2 * ((n + 1) / 2);
  if (degree < 1 || degree > dmax)
    throw std::invalid_argument("homogeneous_component: degree out of range");
  // sample e(eps) = energy(eps*u) at dmax distinct eps, solve for the
  // polynomial coefficients a_1..a_dmax (no constant term: E_n(0) = 0)
  std::vector<double> eps(dmax), rhs(dmax);
  for (int i = 0; i < dmax; ++i) {
    eps[i] = 0.5 + 0.25 * i;
    rhs[i] = energy(scaled(u, cplx{eps[i], 0.0}), n);
  }
  // Vandermonde system M[i][d-1] = eps_i^d, Gaussian elimination with pivoting
  std::vector<std::vector<double>> m(dmax, std::vector<double>(dmax + 1));
  for (int i = 0; i < dmax; ++i) {
    double p = 1.0;
    for (int d = 0; d < dmax; ++d) {
      p *= eps[i];
      m[i][d] = p;
    }
    m[i][dmax] = rhs[i];
  }
  for (int col = 0; col < dmax; ++col) {
    int piv = col;
    for (int r = col + 1; r < dmax; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    std::swap(m[col], m[piv]);
    if (std::abs(m[col][col]) < 1e-14)
      throw std::runtime_error("homogeneous_component: singular Vandermonde");
    for (int r = 0; r < dmax; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int c = col; c <= dmax; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return m[degree - 1][dmax] / m[degree - 1][degree - 1];
}

EnergyReport energy_report(const SpectralField& u, int n) {
  if (n < 1) throw std::invalid_argument("energy_report: n < 1");
  EnergyReport rep;
  rep.n = n;
  HierarchySequence seq = w_sequence(u, 2 * n + 1);
  for (int j = 1; j <= 2 * n + 1; ++j)
    rep.energies.push_back(std::real(l2_inner(seq.at(j), u)));
  rep.quadratic = quadratic_part(u, n);
  rep.remainder = rep.energies[2 * n] - rep.quadratic;
  rep.im_defect = std::imag(l2_inner(seq.at(2 * n + 1), u));
  return rep;
}

}  // namespace mkdv
