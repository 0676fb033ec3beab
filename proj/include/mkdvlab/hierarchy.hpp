#pragma once

#include <array>
#include <vector>

#include "mkdvlab/field.hpp"

namespace mkdv {

/// The hierarchy fields w_1..w_n generated by
///   w_1[u] = u,   w_{j+1}[u] = -i d/dx w_j[u] + conj(u) * sum_{k=1}^{j-1} w_k w_{j-k},
/// with every product dealiased (w_j is a trig polynomial of degree <= j*K).
struct HierarchySequence {
  SpectralField base;
  std::vector<SpectralField> w;  // w[j-1] holds w_j

  const SpectralField& at(int j) const { return w.at(j - 1); }
};

HierarchySequence w_sequence(const SpectralField& u, int n_max);

/// E_n(u) = Re int conj(u) w_n dx, by exact quadrature.
double energy(const SpectralField& u, int n);

/// Im part of int conj(u) w_n dx; diagnostic only, the energy is the Re part.
double energy_im_defect(const SpectralField& u, int n);

/// The explicit closed-form laws for n = 1..5:
///   E1 = int |u|^2
///   E2 = Im int conj(u) du
///   E3 = int |du|^2 + |u|^4
///   E4 = Im int (du d2conj(u) + 3|u|^2 u dconj(u))
///   E5 = int |d2u|^2 + 6|du|^2|u|^2 + |d(|u|^2)|^2 + 2|u|^6
double energy_explicit(const SpectralField& u, int n);

/// Measured convention constants: energy(u,n) == kEnergyConvention[n] * energy_explicit(u,n).
/// The n=4 law is reproduced by the recursion with a factor -1; recorded, not patched.
inline constexpr std::array<double, 6> kEnergyConvention{0.0, 1.0, 1.0, 1.0, -1.0, 1.0};

/// R_n(u) = E_{2n+1}(u) - ||d^n u||_{L2}^2  (n >= 2).
double remainder(const SpectralField& u, int n);

double quadratic_part(const SpectralField& u, int n);  // ||d^n u||_{L2}^2

struct LeadingParts {
  double quadratic = 0.0;        // ||d^n u||^2
  double quartic_leading = 0.0;  // int (d^{n-1}|u|^2)^2 + (4n-2) int |d^{n-1}u|^2 |u|^2
  double residual = 0.0;         // E_{2n+1} - quadratic - quartic_leading
};
LeadingParts leading_parts(const SpectralField& u, int n);

/// Coefficient of eps^degree in eps -> energy(eps*u, n), recovered from a
/// Vandermonde solve over eps in {0.5, 0.75, 1.0, ...}. Only even degrees
/// carry mass (phase invariance); odd-degree queries return ~0.
double homogeneous_component(const SpectralField& u, int n, int degree);

struct EnergyReport {
  int n = 0;                      // hierarchy level (report covers E_1..E_{2n+1})
  std::vector<double> energies;   // energies[j-1] = E_j, j = 1..2n+1
  double quadratic = 0.0;
  double remainder = 0.0;
  double im_defect = 0.0;         // Im int conj(u) w_{2n+1}
};
EnergyReport energy_report(const SpectralField& u, int n);

}  // namespace mkdv
