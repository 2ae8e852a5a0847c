#pragma once

// S^1-fixed Hodge bundles: the critical strata of the Hitchin function.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "higgsmorse/algebra.hpp"
#include "higgsmorse/curve.hpp"
#include "higgsmorse/errors.hpp"
#include "higgsmorse/groups.hpp"

namespace higgsmorse {

using Weight = boost::rational<long>;

inline std::string weight_string(const Weight &w) {
  if (w.denominator() == 1) return std::to_string(w.numerator());
  return std::to_string(w.numerator()) + "/" + std::to_string(w.denominator());
}

/// Floor and ceiling of a rational.
inline long floor_of(const Weight &w) {
  long q = w.numerator() / w.denominator();
  if (w.numerator() % w.denominator() != 0 && w.numerator() < 0) --q;
  return q;
}
inline long ceil_of(const Weight &w) { return -floor_of(-w); }

struct Summand {
  long rank = 1;
  long degree = 0;
  Weight weight{0};
  std::string name;
  bool operator==(const Summand &) const = default;
};

enum class RouteTag { phi, beta, gamma };

inline std::string route_tag_name(RouteTag t) {
  switch (t) {
  case RouteTag::phi: return "phi";
  case RouteTag::beta: return "beta";
  case RouteTag::gamma: return "gamma";
  }
  return "?";
}

/// A nonzero Higgs component between summands.  For phi the map is
/// V_s -> V_t (x) K; for beta it is V_s^* -> V_t (x) K; for gamma V_s -> V_t^* (x) K.
struct HiggsRoute {
  std::size_t source = 0;
  std::size_t target = 0;
  RouteTag tag = RouteTag::phi;
  bool operator==(const HiggsRoute &) const = default;
};

struct HodgeType {
  GroupDatum group;
  std::vector<Summand> summands;
  std::vector<HiggsRoute> routes;
  long total_degree = 0;

  long rank() const {
    long r = 0;
    for (auto &s : summands) r += s.rank;
    return r;
  }
  long degree_sum() const {
    long d = 0;
    for (auto &s : summands) d += s.degree;
    return d;
  }
  bool symplectic() const { return group.kind == GroupKind::Sp2nR; }
};

enum class StratumLabel {
  N0_moduli_of_bundles,
  type_11,
  type_12,
  type_21,
  type_111,
  Nd_sp,
  isolated_hodge_point,
  O2_type_1,
  O2_type_2,
  O2_type_3,
  sp4_chain,
};

inline std::string label_name(StratumLabel l) {
  switch (l) {
  case StratumLabel::N0_moduli_of_bundles: return "N0_moduli_of_bundles";
  case StratumLabel::type_11: return "type_11";
  case StratumLabel::type_12: return "type_12";
  case StratumLabel::type_21: return "type_21";
  case StratumLabel::type_111: return "type_111";
  case StratumLabel::Nd_sp: return "Nd_sp";
  case StratumLabel::isolated_hodge_point: return "isolated_hodge_point";
  case StratumLabel::O2_type_1: return "O2_type_1";
  case StratumLabel::O2_type_2: return "O2_type_2";
  case StratumLabel::O2_type_3: return "O2_type_3";
  case StratumLabel::sp4_chain: return "sp4_chain";
  }
  return "?";
}

struct CriticalStratum {
  HodgeType hodge;
  bool is_phi_zero = false;
  StratumLabel label = StratumLabel::N0_moduli_of_bundles;
  std::string description;
  /// Family parameter: l = deg L_1 (GL(2)), deg L (GL(3) two-step, Sp(4,R) type 1), empty otherwise.
  std::optional<long> parameter;
  /// Shifted index l - (g - 1) for Sp(4,R) type 1, running over [0, 2g-2].
  std::optional<long> offset;
  /// Number of discrete labels (square roots, Stiefel-Whitney classes) this record stands for.
  Integer multiplicity = 1;
  std::vector<std::string> flags;
};

/// Output of an enumeration: stable strata plus polystable-only advisories.
struct Enumeration {
  std::vector<CriticalStratum> strata;
  std::vector<CriticalStratum> borderline;
  std::vector<std::string> notes;
};

inline const char *const kType12Flag =
    "type (1,2) degree range read as d/3 < deg L < d/3 + g - 1 (printed constraint '3d < deg L' is inconsistent)";

// ---------------------------------------------------------------------------
// Fixed-point test

/// Weight of the target required by a route under the group's rule.
inline Weight required_target_weight(RouteTag tag, const Weight &source) {
  switch (tag) {
  case RouteTag::phi: return source + 1;
  case RouteTag::beta: return Weight(1) - source;
  case RouteTag::gamma: return Weight(-1) - source;
  }
  return source;
}

/// True iff every route raises weight by one: GL V_l -> V_{l+1}; Sp
/// beta: V*_l -> V_{l+1}, gamma: V_l -> V*_{-l-1}.  Also rejects repeated weights.
inline bool check_hodge_fixed_point(const HodgeType &h) {
  for (std::size_t i = 0; i < h.summands.size(); ++i)
    for (std::size_t j = i + 1; j < h.summands.size(); ++j)
      if (h.summands[i].weight == h.summands[j].weight) return false;
  for (const auto &r : h.routes) {
    if (r.source >= h.summands.size() || r.target >= h.summands.size()) return false;
    const bool sp_tag = r.tag != RouteTag::phi;
    if (sp_tag != h.symplectic()) return false;
    if (h.summands[r.target].weight != required_target_weight(r.tag, h.summands[r.source].weight)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Slope stability on summand sub-chains (GL-type chains)

struct StabilityVerdict {
  bool stable = true;
  bool polystable_candidate = false; // some proper invariant sub-chain has equal slope
};

using SubchainMask = std::uint32_t;

inline bool mask_has(SubchainMask m, std::size_t i) { return (m >> i) & 1u; }

/// Strict slope comparison for one Higgs-invariant sub-chain.
inline StabilityVerdict slope_stability_check(const HodgeType &h, SubchainMask sub) {
  require(!h.symplectic(), "slope_stability_check: applies to GL-type chains");
  require(h.summands.size() <= 31, "slope_stability_check: too many summands");
  for (const auto &r : h.routes)
    if (mask_has(sub, r.source) && !mask_has(sub, r.target))
      throw ValidationError("slope_stability_check: sub-chain not invariant under route " + route_tag_name(r.tag) +
                            " " + std::to_string(r.source) + "->" + std::to_string(r.target));
  long rs = 0, ds = 0;
  for (std::size_t i = 0; i < h.summands.size(); ++i)
    if (mask_has(sub, i)) {
      rs += h.summands[i].rank;
      ds += h.summands[i].degree;
    }
  const long r = h.rank(), d = h.degree_sum();
  if (rs == 0 || rs == r) return {true, false};
  // ds/rs < d/r
  if (ds * r < d * rs) return {true, false};
  if (ds * r == d * rs) return {false, true};
  return {false, false};
}

inline bool invariant_subchain(const HodgeType &h, SubchainMask sub) {
  return std::all_of(h.routes.begin(), h.routes.end(),
                     [&](const HiggsRoute &r) { return !mask_has(sub, r.source) || mask_has(sub, r.target); });
}

/// Exhaustive check over all Higgs-invariant sub-chains of summands.  A chain
/// whose only violations are equalities is flagged as a polystable candidate.
inline StabilityVerdict chain_stability(const HodgeType &h) {
  bool strict_violation = false, equality = false;
  const SubchainMask full = (SubchainMask(1) << h.summands.size()) - 1;
  for (SubchainMask m = 1; m < full; ++m) {
    if (!invariant_subchain(h, m)) continue;
    auto v = slope_stability_check(h, m);
    if (v.stable) continue;
    if (v.polystable_candidate) equality = true;
    else strict_violation = true;
  }
  if (!strict_violation && !equality) return {true, false};
  return {false, equality && !strict_violation};
}

// ---------------------------------------------------------------------------
// GL(n) enumerations

inline CriticalStratum n0_stratum(const GroupDatum &g, long d, std::string description) {
  CriticalStratum s;
  s.hodge.group = g;
  s.hodge.summands = {{g.standard_rank(), d, Weight(0), "V"}};
  s.hodge.total_degree = d;
  s.is_phi_zero = true;
  s.label = StratumLabel::N0_moduli_of_bundles;
  s.description = std::move(description);
  return s;
}

/// L1 + L2 with deg L1 = l, phi: L1 -> L2 K nonzero, d/2 < l <= d/2 + g - 1.
inline CriticalStratum gl2_stratum(const CurveContext &ctx, long d, long l) {
  CriticalStratum s;
  s.hodge.group = group_datum(GroupKind::GLnC, 2);
  s.hodge.summands = {{1, l, Weight(0), "L1"}, {1, d - l, Weight(1), "L2"}};
  s.hodge.routes = {{0, 1, RouteTag::phi}};
  s.hodge.total_degree = d;
  s.label = StratumLabel::type_11;
  s.parameter = l;
  s.description = "L1+L2, deg L1 = " + std::to_string(l) + ", phi in H0(L1^*L2K) of degree " +
                  std::to_string(d - 2 * l + ctx.canonical_degree());
  return s;
}

inline Enumeration enumerate_gl2_critical(const CurveContext &ctx, long d) {
  ctx.require_hyperbolic();
  require(d % 2 != 0, "enumerate_gl2_critical: degree must be odd (gcd(2,d) = 1)");
  Enumeration out;
  out.strata.push_back(n0_stratum(group_datum(GroupKind::GLnC, 2), d, "M(2," + std::to_string(d) + ")"));
  const long g = ctx.genus;
  // d/2 < l  <=>  l >= (d+1)/2 for odd d; nonzero phi needs d - 2l + 2g - 2 >= 0.
  for (long l = floor_of(Weight(d, 2)) + 1; d - 2 * l + 2 * g - 2 >= 0; ++l) out.strata.push_back(gl2_stratum(ctx, d, l));
  return out;
}

inline Enumeration enumerate_gl3_critical(const CurveContext &ctx, long d) {
  ctx.require_hyperbolic();
  require(d % 3 != 0, "enumerate_gl3_critical: gcd(3,d) must be 1");
  const long g = ctx.genus;
  const long K = ctx.canonical_degree();
  const GroupDatum gl3 = group_datum(GroupKind::GLnC, 3);
  Enumeration out;
  out.strata.push_back(n0_stratum(gl3, d, "M(3," + std::to_string(d) + ")"));

  // (1,2): L (weight 0) -> V2 K, d/3 < l < d/3 + g - 1.
  bool any12 = false;
  const Weight third(d, 3);
  for (long l = floor_of(third) + 1; Weight(l) < third + (g - 1); ++l) {
    CriticalStratum s;
    s.hodge.group = gl3;
    s.hodge.summands = {{1, l, Weight(0), "L"}, {2, d - l, Weight(1), "V2"}};
    s.hodge.routes = {{0, 1, RouteTag::phi}};
    s.hodge.total_degree = d;
    s.label = StratumLabel::type_12;
    s.parameter = l;
    s.description = "L+V2, deg L = " + std::to_string(l);
    s.flags.push_back(kType12Flag);
    out.strata.push_back(std::move(s));
    any12 = true;
  }
  if (any12) out.notes.push_back(kType12Flag);

  // (2,1): V1 (weight 0) -> L K, d/3 - g + 1 < l < d/3 (dual of type (1,2)).
  for (long l = floor_of(third - (g - 1)) + 1; Weight(l) < third; ++l) {
    CriticalStratum s;
    s.hodge.group = gl3;
    s.hodge.summands = {{2, d - l, Weight(0), "V1"}, {1, l, Weight(1), "L"}};
    s.hodge.routes = {{0, 1, RouteTag::phi}};
    s.hodge.total_degree = d;
    s.label = StratumLabel::type_21;
    s.parameter = l;
    s.description = "V1+L, deg L = " + std::to_string(l);
    out.strata.push_back(std::move(s));
  }

  // (1,1,1): L1 -> L2 K -> L3 K^2, nonzero maps and stable tails.
  for (long l1 = floor_of(third) + 1; l1 <= floor_of(third) + 1 + 2 * K; ++l1)
    for (long l2 = l1 - K; l2 <= l1 + 2 * K; ++l2) {
      const long l3 = d - l1 - l2;
      if (l3 - l2 + K < 0 || l2 - l1 + K < 0) continue;
      CriticalStratum s;
      s.hodge.group = gl3;
      s.hodge.summands = {{1, l1, Weight(0), "L1"}, {1, l2, Weight(1), "L2"}, {1, l3, Weight(2), "L3"}};
      s.hodge.routes = {{0, 1, RouteTag::phi}, {1, 2, RouteTag::phi}};
      s.hodge.total_degree = d;
      s.label = StratumLabel::type_111;
      s.description = "L1+L2+L3, degrees (" + std::to_string(l1) + "," + std::to_string(l2) + "," + std::to_string(l3) + ")";
      auto v = chain_stability(s.hodge);
      if (v.stable) out.strata.push_back(std::move(s));
      else if (v.polystable_candidate) out.borderline.push_back(std::move(s));
    }
  return out;
}

// ---------------------------------------------------------------------------
// Sp(2n,R)

/// Routes of a symplectic Hodge type generated from the weight rule.
inline std::vector<HiggsRoute> sp_rule_routes(const std::vector<Summand> &summands) {
  std::vector<HiggsRoute> routes;
  for (std::size_t i = 0; i < summands.size(); ++i)
    for (std::size_t j = 0; j < summands.size(); ++j) {
      if (summands[j].weight == required_target_weight(RouteTag::beta, summands[i].weight))
        routes.push_back({i, j, RouteTag::beta});
      if (summands[j].weight == required_target_weight(RouteTag::gamma, summands[i].weight))
        routes.push_back({i, j, RouteTag::gamma});
    }
  return routes;
}

/// (V, beta, gamma) -> (V*, gamma^t, beta^t): degrees and weights negate.
inline HodgeType sp_dual(const HodgeType &h) {
  HodgeType out = h;
  for (auto &s : out.summands) {
    s.degree = -s.degree;
    s.weight = -s.weight;
    s.name = "(" + s.name + ")*";
  }
  for (auto &r : out.routes) r.tag = r.tag == RouteTag::beta ? RouteTag::gamma : RouteTag::beta;
  out.total_degree = -h.total_degree;
  std::reverse(out.summands.begin(), out.summands.end());
  const std::size_t m = out.summands.size();
  for (auto &r : out.routes) {
    r.source = m - 1 - r.source;
    r.target = m - 1 - r.target;
  }
  return out;
}

/// Milnor-Wood: [-n(g-1), n(g-1)].
struct IntInterval {
  long lo = 0;
  long hi = 0;
  bool contains(long x) const { return lo <= x && x <= hi; }
  long count() const { return hi - lo + 1; }
};

inline IntInterval milnor_wood(long n, const CurveContext &ctx) {
  require(n >= 1, "milnor_wood: n must be >= 1");
  require(ctx.genus >= 2, "milnor_wood: genus must be >= 2");
  return {-n * (ctx.genus - 1), n * (ctx.genus - 1)};
}

inline CriticalStratum nd_stratum(const GroupDatum &g, long d) {
  CriticalStratum s;
  s.hodge.group = g;
  s.hodge.total_degree = d;
  s.label = StratumLabel::Nd_sp;
  s.parameter = d;
  if (d <= 0) {
    s.hodge.summands = {{g.n, d, Weight(-1, 2), "V"}};
    s.hodge.routes = {{0, 0, RouteTag::gamma}};
    s.description = "N_" + std::to_string(d) + ": beta = 0";
  } else {
    s.hodge.summands = {{g.n, d, Weight(1, 2), "V"}};
    s.hodge.routes = {{0, 0, RouteTag::beta}};
    s.description = "N_" + std::to_string(d) + ": gamma = 0";
  }
  return s;
}

/// Hodge point at d = -n(g-1): V = sum L^{-1}K^{-2j} (n odd) or L K^{-2j} (n even), L^2 = K.
inline CriticalStratum sp_isolated_point(const GroupDatum &g, const CurveContext &ctx) {
  const long n = g.n;
  require(n != 2, "sp_isolated_point: n = 2 is handled by the Sp(4,R) classification");
  const long K = ctx.canonical_degree();
  std::vector<Summand> summands;
  // Each summand is K^a with half-integer a; its weight is -a and degree a(2g-2).
  auto add = [&](Weight a, const std::string &name) {
    Weight deg = a * K;
    summands.push_back({1, deg.numerator() / deg.denominator(), -a, name});
  };
  if (n % 2 == 1) {
    const long q = (n - 1) / 2;
    for (long j = -q; j <= q; ++j) add(Weight(-1, 2) - 2 * j, "L^-1 K^" + std::to_string(-2 * j));
  } else {
    const long q = (n - 2) / 2;
    for (long j = -q; j <= q + 1; ++j) add(Weight(1, 2) - 2 * j, "L K^" + std::to_string(-2 * j));
  }
  std::sort(summands.begin(), summands.end(), [](const Summand &a, const Summand &b) { return a.weight < b.weight; });
  CriticalStratum s;
  s.hodge.group = g;
  s.hodge.summands = std::move(summands);
  s.hodge.routes = sp_rule_routes(s.hodge.summands);
  s.hodge.total_degree = s.hodge.degree_sum();
  s.label = StratumLabel::isolated_hodge_point;
  s.multiplicity = Integer(1) << (2 * ctx.genus);
  s.description = "isolated Hodge point, L^2 = K (one per square root of K)";
  return s;
}

inline Enumeration sp4_maximal_types(const CurveContext &ctx);

inline Enumeration enumerate_sp2nR_minima(long n, const CurveContext &ctx, long d) {
  ctx.require_hyperbolic();
  auto mw = milnor_wood(n, ctx);
  require(mw.contains(d), "enumerate_sp2nR_minima: |d| = " + std::to_string(d < 0 ? -d : d) +
                              " exceeds the Milnor-Wood bound n(g-1) = " + std::to_string(mw.hi));
  const GroupDatum g = group_datum(GroupKind::Sp2nR, static_cast<int>(n));
  const bool maximal = d == mw.lo || d == mw.hi;
  if (n == 2 && maximal) {
    Enumeration e = sp4_maximal_types(ctx);
    if (d < 0) {
      for (auto *list : {&e.strata, &e.borderline})
        for (auto &s : *list) s.hodge = sp_dual(s.hodge);
      e.notes.push_back("negative maximal Toledo invariant obtained by duality (V*, gamma^t, beta^t)");
    }
    return e;
  }
  Enumeration out;
  out.strata.push_back(nd_stratum(g, d));
  if (maximal) {
    CriticalStratum p = sp_isolated_point(g, ctx);
    if (d > 0) {
      p.hodge = sp_dual(p.hodge);
      p.description = "isolated Hodge point (dual form), L^2 = K (one per square root of K)";
    }
    out.strata.push_back(std::move(p));
  }
  return out;
}

/// Minima families of maximal Sp(4,R)-Higgs bundles at d = 2g - 2.
inline Enumeration sp4_maximal_types(const CurveContext &ctx) {
  require(ctx.genus >= 2, "sp4_maximal_types: genus must be >= 2");
  const long g = ctx.genus, K = ctx.canonical_degree();
  const GroupDatum sp4 = group_datum(GroupKind::Sp2nR, 2);
  const Integer roots = Integer(1) << (2 * g);
  Enumeration out;

  auto beta_zero = [&](StratumLabel label, std::string description) {
    CriticalStratum s;
    s.hodge.group = sp4;
    s.hodge.summands = {{2, K, Weight(-1, 2), "V"}};
    s.hodge.routes = {{0, 0, RouteTag::gamma}};
    s.hodge.total_degree = K;
    s.label = label;
    s.description = std::move(description);
    return s;
  };

  for (long l = g - 1; l <= 3 * g - 3; ++l) {
    CriticalStratum s;
    if (l == g - 1) {
      s = beta_zero(StratumLabel::O2_type_1, "V = L + L^-1 K, deg L = g-1, beta = 0");
    } else {
      s.hodge.group = sp4;
      s.hodge.summands = {{1, l, Weight(-3, 2), "L"}, {1, K - l, Weight(1, 2), "L^-1 K"}};
      s.hodge.routes = {{0, 1, RouteTag::gamma}, {1, 0, RouteTag::gamma}, {1, 1, RouteTag::beta}};
      s.hodge.total_degree = K;
      s.label = StratumLabel::O2_type_1;
      s.description = "V = L + L^-1 K, deg L = " + std::to_string(l) + ", beta_2 in H0(L^-2 K^3) nonzero";
    }
    s.parameter = l;
    s.offset = l - (g - 1);
    if (l == 3 * g - 3) {
      s.multiplicity = roots;
      s.description += ", L^2 = K^3 (one per choice of K^{3/2})";
    }
    out.strata.push_back(std::move(s));
  }

  CriticalStratum t2 = beta_zero(StratumLabel::O2_type_2, "V = pi_*(L~ (x) i*L~^-1) K^{1/2}, labels (w1 != 0, w2), beta = 0");
  t2.multiplicity = 2 * (roots - 1);
  out.strata.push_back(std::move(t2));

  CriticalStratum t3 = beta_zero(StratumLabel::O2_type_3, "V = V1 + V2, maximal Sp(2,R) summands, beta = 0");
  t3.multiplicity = roots * (roots + 1) / 2;
  t3.flags.push_back("decomposable: polystable, not stable");
  out.borderline.push_back(std::move(t3));
  return out;
}

/// Sp(4,R) chains L2 -> L1* -> L1 -> L2* (weights -3/2, 1/2), 0 <= d < 2g - 2.
/// These are S^1-fixed but are not minima; used as a contrast family.
inline Enumeration enumerate_sp4_chain_strata(const CurveContext &ctx, long d) {
  ctx.require_hyperbolic();
  const long g = ctx.genus, K = ctx.canonical_degree();
  require(d >= 0 && d < K, "enumerate_sp4_chain_strata: needs 0 <= d < 2g-2");
  Enumeration out;
  for (long l1 = 1 - g; 2 * l1 < d; ++l1) {
    const long l2 = d - l1;
    if (l2 <= 0) continue;
    CriticalStratum s;
    s.hodge.group = group_datum(GroupKind::Sp2nR, 2);
    s.hodge.summands = {{1, l2, Weight(-3, 2), "L2"}, {1, l1, Weight(1, 2), "L1"}};
    s.hodge.routes = sp_rule_routes(s.hodge.summands);
    s.hodge.total_degree = d;
    s.label = StratumLabel::sp4_chain;
    s.parameter = l1;
    s.description = "L2 -> L1* -> L1 -> L2*, deg L1 = " + std::to_string(l1);
    out.strata.push_back(std::move(s));
  }
  return out;
}

} // namespace higgsmorse
