#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mkdvlab/field.hpp"
#include "mkdvlab/measures.hpp"
#include "mkdvlab/stats.hpp"

namespace mkdv {

/// 6-tuple of modes with the fixed conjugation signature (+,-,-,+,-,+)
/// matching the monomial g_{j1} conj(g_{j2}) conj(g_{j3}) g_{j4} conj(g_{j5}) g_{j6}.
using IndexVector6 = std::array<int, 6>;

inline constexpr std::array<int, 6> kSignature{+1, -1, -1, +1, -1, +1};
inline constexpr std::array<int, 3> kPlusSlots{0, 3, 5};   // 0-based
inline constexpr std::array<int, 3> kMinusSlots{1, 2, 4};

inline long l_sum(const IndexVector6& j) {
  return static_cast<long>(j[0]) - j[1] - j[2] + j[3] - j[4] + j[5];
}
inline long p_sum(const IndexVector6& j) {
  return static_cast<long>(j[0]) - j[1] - j[2];
}

/// Pairing class per the r-pairing definition: r equal-value pairs across
/// opposite signature slots, the unpaired slots carrying no cross equality.
/// r is maximal (a maximum matching); ties between equally large matchings are
/// broken lexicographically (plus slots in order 1,4,6; minus slots 2,3,5),
/// which makes the 1-pairing families a partition.
struct PairingClass {
  int r = 0;
  std::array<int, 3> x{};  // paired plus slots, 0-based, first r entries valid
  std::array<int, 3> y{};  // matching minus slots
};

PairingClass classify(const IndexVector6& v);

enum class FamilyTag {
  I0,
  I12, I13, I15, I24, I26, I34, I36, I45, I56,  // 1-pairing at slots {k,l}
  TildeI26, HatI26, TildeI36, HatI36,
};

std::string family_name(FamilyTag f);
/// 0-based slot pair {min,max} for a 1-pairing tag; throws for I0.
std::pair<int, int> family_slots(FamilyTag f);

/// Membership in the tagged subfamily of I_N = {all entries in [-N,N],
/// L(j) = 0, |P(j)| > N}.
bool in_family(const IndexVector6& v, int N, FamilyTag f);

/// Visit every member of I_N once, in lexicographic order of (j1..j5)
/// (j6 is eliminated through L = 0). Exhaustive mode, N <= 64.
void for_each_index_vector(int N, const std::function<void(const IndexVector6&)>& fn);

/// Stream the members of a family in the same deterministic order.
void enumerate_family(int N, FamilyTag f,
                      const std::function<void(const IndexVector6&)>& fn);
std::vector<IndexVector6> family_members(int N, FamilyTag f);

enum class CoefficientKind { A, B, C, An };

/// A(j)  = (j1-j2-j3)(j4-j5+j6) j6 / prod <j_i^2>
/// B(j)  = j1 j2 j6 / prod <j_i^2>
/// C(j)  = j2 j3 j6 / prod <j_i^2>      (Fourier expansion of the third
///         surviving E*_5 integrand; validated by the duality test)
/// An(j) = (j1-j2-j3)^{n-1}(j4-j5+j6)^{n-1} j6 / prod sqrt(1+j_i^{2n})
/// with <x> = sqrt(1+x^2), so <j^2> = sqrt(1+j^4); the An denominator carries
/// the mu_n sampler weight, hence An at order 2 is exactly A.
struct Coefficient {
  CoefficientKind kind = CoefficientKind::A;
  int order = 2;  // n for kind An
};

double coefficient(const IndexVector6& v, const Coefficient& c);

/// sum over the family of coeff(v) * g_{j1} conj(g_{j2}) ... ; g is indexed
/// j = -N..N (g[j + N]). Compensated accumulation.
cplx pathwise_sum(int N, FamilyTag f, const Coefficient& c, std::span<const cplx> g);
cplx pathwise_sum_over(std::span<const IndexVector6> members, const Coefficient& c,
                       std::span<const cplx> g, int N);

/// Right-hand side of the second-moment bound: for a 1-pairing family,
/// sum over the free 4-tuple h of (sum over the paired value of |coeff|)^2;
/// for I0 the plain sum of squares.
double second_moment_bound(int N, FamilyTag f, const Coefficient& c);

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Exact E|S|^2 of S = sum over family of coeff * monomial, via the
/// complex-gaussian Isserlis rule E[g^m conj(g)^m] = m!  (E|g|^2 = 1).
/// Monomials correlate iff they carry the same per-value net signature;
/// then E[M conj(M')] = prod_v (p_v + q'_v)!.  Exact mode requires N <= 4.
double wick_second_moment(int N, FamilyTag f, const Coefficient& c);

/// MC estimate of the squared L^2(mu_2) norm of the cutoff-weighted E*_{j,N},
/// for each N in the ladder (chi_R' weight on E_3 for j=3, chi_R for j=5).
std::vector<InvariancePoint> estar_l2_decay(int j, std::span<const int> n_ladder,
                                            double R,
                                            const GaussianSamplerSpec& spec,
                                            long n_samples, int workers = 1);

}  // namespace mkdv
