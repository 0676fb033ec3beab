#include "mkdvlab/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mkdvlab/flow.hpp"
#include "mkdvlab/hierarchy.hpp"

namespace mkdv {
namespace {

// equality matrix between plus and minus slots
struct EqMask {
  bool eq[3][3];
  bool any = false;
};

EqMask equalities(const IndexVector6& v) {
  EqMask m{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      m.eq[a][b] = v[kPlusSlots[a]] == v[kMinusSlots[b]];
      m.any = m.any || m.eq[a][b];
    }
  return m;
}

const std::array<std::array<int, 3>, 6> kPerm3{{{0, 1, 2},
                                                {0, 2, 1},
                                                {1, 0, 2},
                                                {1, 2, 0},
                                                {2, 0, 1},
                                                {2, 1, 0}}};

}  // namespace

PairingClass classify(const IndexVector6& v) {
  const EqMask m = equalities(v);
  PairingClass cl;
  if (!m.any) return cl;  // 0-pairing
  // r = 3: match all plus slots to a permutation of minus slots
  for (const auto& perm : kPerm3) {
    if (m.eq[0][perm[0]] && m.eq[1][perm[1]] && m.eq[2][perm[2]]) {
      cl.r = 3;
      for (int a = 0; a < 3; ++a) {
        cl.x[a] = kPlusSlots[a];
        cl.y[a] = kMinusSlots[perm[a]];
      }
      return cl;
    }
  }
  // r = 2: pick two plus slots and two distinct minus slots; the two leftover
  // slots must not be cross-equal (otherwise the matching would extend)
  for (int a0 = 0; a0 < 3; ++a0)
    for (int a1 = a0 + 1; a1 < 3; ++a1)
      for (int b0 = 0; b0 < 3; ++b0)
        for (int b1 = 0; b1 < 3; ++b1) {
          if (b0 == b1) continue;
          if (!m.eq[a0][b0] || !m.eq[a1][b1]) continue;
          const int a2 = 3 - a0 - a1;
          const int b2 = 3 - b0 - b1;
          if (m.eq[a2][b2]) continue;  // would be a 3-pairing
          cl.r = 2;
          cl.x = {kPlusSlots[a0], kPlusSlots[a1], 0};
          cl.y = {kMinusSlots[b0], kMinusSlots[b1], 0};
          return cl;
        }
  // r = 1: single edge; the remaining slots must carry no cross equality
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      if (!m.eq[a][b]) continue;
      bool clean = true;
      for (int a2 = 0; a2 < 3 && clean; ++a2)
        for (int b2 = 0; b2 < 3; ++b2) {
          if (a2 == a || b2 == b) continue;
          if (m.eq[a2][b2]) {
            clean = false;
            break;
          }
        }
      if (clean) {
        cl.r = 1;
        cl.x = {kPlusSlots[a], 0, 0};
        cl.y = {kMinusSlots[b], 0, 0};
        return cl;
      }
    }
  // unreachable for a true maximum matching: some edge always admits r=1 when
  // no larger matching exists, except when every edge has a disjoint partner,
  // which the r=2/r=3 branches already caught.
  cl.r = 1;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (m.eq[a][b]) {
        cl.x = {kPlusSlots[a], 0, 0};
        cl.y = {kMinusSlots[b], 0, 0};
        return cl;
      }
  return cl;
}

std::string family_name(FamilyTag f) {
  switch (f) {
    case FamilyTag::I0: return "I0";
    case FamilyTag::I12: return "I(1,2)";
    case FamilyTag::I13: return "I(1,3)";
    case FamilyTag::I15: return "I(1,5)";
    case FamilyTag::I24: return "I(2,4)";
    case FamilyTag::I26: return "I(2,6)";
    case FamilyTag::I34: return "I(3,4)";
    case FamilyTag::I36: return "I(3,6)";
    case FamilyTag::I45: return "I(4,5)";
    case FamilyTag::I56: return "I(5,6)";
    case FamilyTag::TildeI26: return "TildeI(2,6)";
    case FamilyTag::HatI26: return "HatI(2,6)";
    case FamilyTag::TildeI36: return "TildeI(3,6)";
    case FamilyTag::HatI36: return "HatI(3,6)";
  }
  return "?";
}

std::pair<int, int> family_slots(FamilyTag f) {
  switch (f) {
    case FamilyTag::I12: return {0, 1};
    case FamilyTag::I13: return {0, 2};
    case FamilyTag::I15: return {0, 4};
    case FamilyTag::I24: return {1, 3};
    case FamilyTag::I26:
    case FamilyTag::TildeI26:
    case FamilyTag::HatI26: return {1, 5};
    case FamilyTag::I34: return {2, 3};
    case FamilyTag::I36:
    case FamilyTag::TildeI36:
    case FamilyTag::HatI36: return {2, 5};
    case FamilyTag::I45: return {3, 4};
    case FamilyTag::I56: return {4, 5};
    case FamilyTag::I0: break;
  }
  throw std::invalid_argument("family_slots: I0 has no slot pair");
}

namespace {

int distinct_count(const IndexVector6& v) {
  std::array<int, 6> s = v;
  std::sort(s.begin(), s.end());
  return static_cast<int>(std::unique(s.begin(), s.end()) - s.begin());
}

bool matches_tag(const IndexVector6& v, FamilyTag f) {
  const PairingClass cl = classify(v);
  if (f == FamilyTag::I0) return cl.r == 0;
  if (cl.r != 1) return false;
  const auto [a, b] = family_slots(f);
  const int lo = std::min(cl.x[0], cl.y[0]);
  const int hi = std::max(cl.x[0], cl.y[0]);
  if (lo != a || hi != b) return false;
  switch (f) {
    case FamilyTag::TildeI26:
    case FamilyTag::TildeI36: return distinct_count(v) == 5;
    case FamilyTag::HatI26:
    case FamilyTag::HatI36: return distinct_count(v) != 5;
    default: return true;
  }
}

}  // namespace

bool in_family(const IndexVector6& v, int N, FamilyTag f) {
  for (int x : v)
    if (x < -N || x > N) return false;
  if (l_sum(v) != 0) return false;
  if (std::abs(p_sum(v)) <= N) return false;
  return matches_tag(v, f);
}

void for_each_index_vector(int N, const std::function<void(const IndexVector6&)>& fn) {
  if (N > 64) throw std::invalid_argument("for_each_index_vector: exhaustive mode needs N <= 64");
  IndexVector6 v{};
  for (int j1 = -N; j1 <= N; ++j1)
    for (int j2 = -N; j2 <= N; ++j2)
      for (int j3 = -N; j3 <= N; ++j3) {
        const int p = j1 - j2 - j3;
        if (p <= N && p >= -N) continue;  // |P| > N prune
        for (int j4 = -N; j4 <= N; ++j4)
          for (int j5 = -N; j5 <= N; ++j5) {
            const int j6 = -(p + j4 - j5);
            if (j6 < -N || j6 > N) continue;
            v = {j1, j2, j3, j4, j5, j6};
            fn(v);
          }
      }
}

void enumerate_family(int N, FamilyTag f,
                      const std::function<void(const IndexVector6&)>& fn) {
  for_each_index_vector(N, [&](const IndexVector6& v) {
    if (matches_tag(v, f)) fn(v);
  });
}

std::vector<IndexVector6> family_members(int N, FamilyTag f) {
  std::vector<IndexVector6> out;
  enumerate_family(N, f, [&](const IndexVector6& v) { out.push_back(v); });
  return out;
}

double coefficient(const IndexVector6& v, const Coefficient& c) {
  const double p = static_cast<double>(p_sum(v));
  const double m = static_cast<double>(v[3]) - v[4] + v[5];
  switch (c.kind) {
    case CoefficientKind::A:
    case CoefficientKind::B:
    case CoefficientKind::C: {
      double den = 1.0;
      for (int x : v) den *= std::sqrt(1.0 + std::pow(static_cast<double>(x), 4));
      if (c.kind == CoefficientKind::A) return p * m * v[5] / den;
      if (c.kind == CoefficientKind::B)
        return static_cast<double>(v[0]) * v[1] * v[5] / den;
      return static_cast<double>(v[1]) * v[2] * v[5] / den;
    }
    case CoefficientKind::An: {
      const int n = c.order;
      double den = 1.0;
      for (int x : v)
        den *= std::sqrt(1.0 + std::pow(std::abs(static_cast<double>(x)), 2.0 * n));
      return std::pow(p, n - 1) * std::pow(m, n - 1) * v[5] / den;
    }
  }
  return 0.0;
}

namespace {

cplx monomial(const IndexVector6& v, std::span<const cplx> g, int N) {
  cplx m{1.0, 0.0};
  for (int slot = 0; slot < 6; ++slot) {
    const cplx z = g[v[slot] + N];
    m *= (kSignature[slot] > 0) ? z : std::conj(z);
  }
  return m;
}

}  // namespace

cplx pathwise_sum_over(std::span<const IndexVector6> members, const Coefficient& c,
                       std::span<const cplx> g, int N) {
  KahanSum re, im;
  for (const auto& v : members) {
    const cplx t = coefficient(v, c) * monomial(v, g, N);
    re.add(t.real());
    im.add(t.imag());
  }
  return {re.value(), im.value()};
}

cplx pathwise_sum(int N, FamilyTag f, const Coefficient& c, std::span<const cplx> g) {
  if (static_cast<int>(g.size()) != 2 * N + 1)
    throw std::invalid_argument("pathwise_sum: g must hold 2N+1 entries");
  KahanSum re, im;
  enumerate_family(N, f, [&](const IndexVector6& v) {
    const cplx t = coefficient(v, c) * monomial(v, g, N);
    re.add(t.real());
    im.add(t.imag());
  });
  return {re.value(), im.value()};
}

double second_moment_bound(int N, FamilyTag f, const Coefficient& c) {
  if (f == FamilyTag::I0) {
    KahanSum acc;
    enumerate_family(N, f, [&](const IndexVector6& v) {
      const double a = coefficient(v, c);
      acc.add(a * a);
    });
    return acc.value();
  }
  const auto [sa, sb] = family_slots(f);
  std::array<int, 4> free{};
  int q = 0;
  for (int s = 0; s < 6; ++s)
    if (s != sa && s != sb) free[q++] = s;
  // L = 0 does not see the paired value (opposite signs), so it pins the last
  // free slot from the first three.
  KahanSum acc;
  IndexVector6 v{};
  for (int f0 = -N; f0 <= N; ++f0)
    for (int f1 = -N; f1 <= N; ++f1)
      for (int f2 = -N; f2 <= N; ++f2) {
        v[free[0]] = f0;
        v[free[1]] = f1;
        v[free[2]] = f2;
        long partial = 0;
        for (int i = 0; i < 3; ++i)
          partial += static_cast<long>(kSignature[free[i]]) * v[free[i]];
        const long f3v = -static_cast<long>(kSignature[free[3]]) * partial;
        if (f3v < -N || f3v > N) continue;
        v[free[3]] = static_cast<int>(f3v);
        KahanSum inner;
        bool seen = false;
        for (int j = -N; j <= N; ++j) {
          v[sa] = j;
          v[sb] = j;
          if (std::abs(p_sum(v)) <= N) continue;
          if (!matches_tag(v, f)) continue;
          inner.add(std::abs(coefficient(v, c)));
          seen = true;
        }
        if (seen) acc.add(inner.value() * inner.value());
      }
  return acc.value();
}

double wick_second_moment(int N, FamilyTag f, const Coefficient& c) {
  if (N > 4) throw BudgetExceeded("wick_second_moment: exact mode needs N <= 4");
  const std::vector<IndexVector6> members = family_members(N, f);
  // per-value (p, q) = (#g, #conj g) counts; the group key is the nonzero net
  // signature p - q per value
  struct Counts {
    std::vector<std::pair<int, std::pair<int, int>>> pv;  // value -> (p, q), sorted
  };
  std::vector<Counts> counts(members.size());
  std::vector<double> coeffs(members.size());
  std::map<std::vector<std::pair<int, int>>, std::vector<size_t>> groups;
  for (size_t i = 0; i < members.size(); ++i) {
    const auto& v = members[i];
    coeffs[i] = coefficient(v, c);
    std::map<int, std::pair<int, int>> tally;
    for (int slot = 0; slot < 6; ++slot) {
      auto& pq = tally[v[slot]];
      (kSignature[slot] > 0 ? pq.first : pq.second) += 1;
    }
    std::vector<std::pair<int, int>> key;
    for (const auto& [val, pq] : tally) {
      counts[i].pv.emplace_back(val, pq);
      if (pq.first != pq.second) key.emplace_back(val, pq.first - pq.second);
    }
    groups[key].push_back(i);
  }
  static const double kFact[7] = {1, 1, 2, 6, 24, 120, 720};
  KahanSum total;
  for (const auto& [key, idx] : groups) {
    for (size_t a : idx)
      for (size_t b : idx) {
        // E[M_a conj(M_b)] = prod_v (p_v + q'_v)! when nets agree, else 0
        double prod = 1.0;
        size_t ia = 0, ib = 0;
        const auto& pa = counts[a].pv;
        const auto& pb = counts[b].pv;
        bool ok = true;
        while (ia < pa.size() || ib < pb.size()) {
          int va = ia < pa.size() ? pa[ia].first : INT32_MAX;
          int vb = ib < pb.size() ? pb[ib].first : INT32_MAX;
          int p = 0, qp = 0, qq = 0, pp = 0;
          if (va == vb) {
            p = pa[ia].second.first;
            qq = pa[ia].second.second;
            pp = pb[ib].second.first;
            qp = pb[ib].second.second;
            ++ia; ++ib;
          } else if (va < vb) {
            p = pa[ia].second.first;
            qq = pa[ia].second.second;
            ++ia;
          } else {
            pp = pb[ib].second.first;
            qp = pb[ib].second.second;
            ++ib;
          }
          const int e1 = p + qp;   // g exponent of the product
          const int e2 = qq + pp;  // conj g exponent
          if (e1 != e2) { ok = false; break; }
          prod *= kFact[e1];
        }
        if (ok) total.add(coeffs[a] * coeffs[b] * prod);
      }
  }
  return total.value();
}

std::vector<InvariancePoint> estar_l2_decay(int j, std::span<const int> n_ladder,
                                            double R,
                                            const GaussianSamplerSpec& spec,
                                            long n_samples, int workers) {
  if (spec.n != 2)
    throw std::invalid_argument("estar_l2_decay: sampler level must be n = 2");
  const CutoffSpec cut{R};
  std::vector<InvariancePoint> out;
  for (int N : n_ladder) {
    auto functional = [&, N](const SpectralField& u) {
      const SpectralField v = truncated(project_low(u, N), std::min(N, u.cutoff()));
      const double e1 = energy_explicit(v, 1);
      const double e3 = energy_explicit(v, 3);
      const double w = (j == 3)
                           ? chi_r(e1, cut, false) * chi_r(e3, cut, true) *
                                 e_star(u, 3, N, EStarMethod::analytic)
                           : chi_r(e1, cut, false) * chi_r(e3, cut, false) *
                                 e_star(u, 5, N, EStarMethod::analytic);
      return w * w;
    };
    InvariancePoint pt;
    pt.N = N;
    pt.defect = mc_expectation(functional, spec, n_samples, workers);
    out.push_back(pt);
  }
  return out;
}

}  // namespace mkdv
