#pragma once

// Component counts, Cayley partners, sigma-pair chambers and the Hitchin base.

#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "higgsmorse/algebra.hpp"
#include "higgsmorse/critical.hpp"
#include "higgsmorse/curve.hpp"
#include "higgsmorse/groups.hpp"

namespace higgsmorse {

inline IntInterval milnor_wood(long n, long g) { return milnor_wood(n, CurveContext(std::max(g, 0L))); }

struct ComponentEntry {
  std::string label;
  Integer count = 0;
  std::string provenance;
};

struct ComponentReport {
  GroupDatum group;
  long genus = 0;
  long toledo = 0;
  std::optional<Integer> total; // empty means UNKNOWN
  std::vector<ComponentEntry> breakdown;

  std::string total_string() const { return total ? total->str() : "UNKNOWN"; }
  bool consistent() const {
    if (!total) return true;
    Integer s = 0;
    for (const auto &e : breakdown) s += e.count;
    return s == *total;
  }
};

inline Integer two_pow_2g(long g) { return Integer(1) << static_cast<unsigned>(2 * g); }

namespace detail {
inline void require_genus(long g) { require(g >= 2, "genus must be >= 2 (got " + std::to_string(g) + ")"); }
inline void check_report(const ComponentReport &r) {
  if (!r.consistent()) throw ConsistencyError("component breakdown does not sum to the total for " + r.group.name);
}
} // namespace detail

/// Maximal Toledo invariant, n >= 3: 2 * 2^{2g} Stiefel-Whitney labels plus 2^{2g} Hitchin components.
inline ComponentReport count_sp2nR_maximal(long n, long g) {
  detail::require_genus(g);
  require(n >= 3, "count_sp2nR_maximal: n < 3; use count_sp4_maximal for n = 2 or count_sp2nR_nonmaximal");
  const Integer q = two_pow_2g(g);
  ComponentReport r{group_datum(GroupKind::Sp2nR, static_cast<int>(n)), g, n * (g - 1), 3 * q, {}};
  r.breakdown = {{"(w1,w2)", 2 * q, "Cayley partner Stiefel-Whitney classes, 2*2^{2g}"},
                 {"Hitchin(L^2=K)", q, "square roots of K, 2^{2g}"}};
  detail::check_report(r);
  return r;
}

/// Maximal Sp(4,R): 2(2^{2g}-1) + (2g-2) + 2^{2g}.
inline ComponentReport count_sp4_maximal(long g) {
  detail::require_genus(g);
  const Integer q = two_pow_2g(g);
  ComponentReport r{group_datum(GroupKind::Sp2nR, 2), g, 2 * (g - 1), 3 * q + 2 * g - 4, {}};
  r.breakdown = {{"M_{w1,w2}, w1!=0", 2 * (q - 1), "non-trivial w1, w2 in {0,1}"},
                 {"M0_l, g-1<=deg L<3g-3", Integer(2 * g - 2), "one connected family per l"},
                 {"M_{K^{3/2}}", q, "Hitchin components, choices of L^2 = K^3"}};
  detail::check_report(r);
  return r;
}

inline ComponentReport count_sp2nR_nonmaximal(long n, long g, long d) {
  detail::require_genus(g);
  require(n >= 1, "count_sp2nR_nonmaximal: n must be >= 1");
  require(std::abs(d) < n * (g - 1), "count_sp2nR_nonmaximal: |d| must be < n(g-1) = " + std::to_string(n * (g - 1)));
  ComponentReport r{group_datum(GroupKind::Sp2nR, static_cast<int>(n)), g, d, std::nullopt, {}};
  if (n == 2) {
    r.total = 1;
    r.breakdown = {{"M_d", 1, "connected"}};
  } else if (d == 0) {
    r.total = 1;
    r.breakdown = {{"M_0", 1, "M(n,0) connected"}};
  } else {
    r.breakdown = {{"M_d", 1, "conjectured 1"}};
  }
  detail::check_report(r);
  return r;
}

/// Orthogonal bundle W = V K^{-1/2} (or V* K^{-1/2} when d < 0) at maximal Toledo invariant.
struct CayleyDatum {
  long rank = 0;
  long degree = 0;
  Integer sw1_classes = 0;
  Integer sw2_classes = 2;
  std::string twist; // which side is the isomorphism
  Integer label_space() const { return sw1_classes * sw2_classes; }
};

inline CayleyDatum cayley_partner(long n, long g, long d, long deg_v) {
  detail::require_genus(g);
  require(n >= 1, "cayley_partner: n must be >= 1");
  const long maxd = n * (g - 1);
  require(std::abs(d) == maxd, "cayley_partner: |d| must equal n(g-1) = " + std::to_string(maxd) +
                                   " (one of beta, gamma has maximal rank only there)");
  require(deg_v == d, "cayley_partner: deg V must equal d");
  CayleyDatum c;
  c.rank = n;
  if (d > 0) {
    c.degree = deg_v - maxd;
    c.twist = "gamma: V -> V* K isomorphism, W = V K^{-1/2}";
  } else {
    c.degree = -deg_v - maxd;
    c.twist = "beta: V* -> V K isomorphism, W = V* K^{-1/2}";
  }
  c.sw1_classes = two_pow_2g(g);
  return c;
}

using Rational = boost::rational<long>;

struct SigmaPair {
  Rational sigma{0};
  long v = 0;
  bool wall = false;
  long chamber = 0; // index of the open subinterval, or of the wall point when `wall`
};

/// sigma = -d/6 + l/2 in [0, v/2], v = d - l + 2g - 2; walls where v/2 +- sigma is an integer.
inline SigmaPair sigma_pair_map(long d, long l, long g) {
  detail::require_genus(g);
  SigmaPair p;
  p.sigma = Rational(-d, 6) + Rational(l, 2);
  p.v = d - l + 2 * g - 2;
  const Rational half_v(p.v, 2);
  require(p.sigma >= 0 && p.sigma <= half_v, "sigma_pair_map: sigma = " + std::to_string(p.sigma.numerator()) + "/" +
                                                  std::to_string(p.sigma.denominator()) +
                                                  " outside [0, v/2] with v = " + std::to_string(p.v));
  // Walls: sigma with v/2 - sigma in Z or v/2 + sigma in Z, i.e. sigma in (v/2 + Z) within [0, v/2].
  std::vector<Rational> walls;
  for (Rational w = half_v; w >= 0; w -= 1) walls.push_back(w);
  std::sort(walls.begin(), walls.end());
  long below = 0;
  for (const auto &w : walls) {
    if (w == p.sigma) {
      p.wall = true;
      p.chamber = below;
      return p;
    }
    if (w < p.sigma) ++below;
  }
  p.chamber = below;
  return p;
}

struct HitchinBase {
  std::vector<std::pair<long, long>> table; // (p, h0(K^p))
  long dimension = 0;
};

/// Sum of h0(K^p) over the invariant-polynomial degrees p, cross-checked against (g-1)(2n^2+n).
inline HitchinBase hitchin_base_dim(const GroupDatum &group, long g, const std::vector<long> &exponents) {
  detail::require_genus(g);
  require(group.kind == GroupKind::Sp2nR, "hitchin_base_dim: only Sp(2n,R) is supported");
  const CurveContext ctx(g);
  const long n = group.n;
  HitchinBase b;
  for (long p : exponents) {
    require(p >= 1, "hitchin_base_dim: exponents must be >= 1");
    const long h0 = h0_line_bundle(ctx, p * ctx.canonical_degree(), p == 1 ? SpecialBundle::canonical : SpecialBundle::none).generic;
    b.table.emplace_back(p, h0);
    b.dimension += h0;
  }
  const long closed = (g - 1) * (2 * n * n + n);
  if (b.dimension != closed)
    throw ConsistencyError("hitchin_base_dim: sum " + std::to_string(b.dimension) + " != (g-1)(2n^2+n) = " +
                           std::to_string(closed));
  return b;
}

/// Exponents 2, 4, ..., 2n.
inline HitchinBase hitchin_base_dim(const GroupDatum &group, long g) {
  std::vector<long> exps;
  for (long i = 1; i <= group.n; ++i) exps.push_back(2 * i);
  return hitchin_base_dim(group, g, exps);
}

} // namespace higgsmorse
