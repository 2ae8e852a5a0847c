#pragma once

// Riemann-Roch bookkeeping on a smooth closed curve of genus g.

#include <algorithm>

#include "higgsmorse/algebra.hpp"
#include "higgsmorse/errors.hpp"

namespace higgsmorse {

struct CurveContext {
  long genus = 2;

  explicit CurveContext(long g) : genus(g) { require(g >= 0, "genus must be >= 0"); }
  long canonical_degree() const { return 2 * genus - 2; }
  /// Moduli-space enumeration lives in genus >= 2.
  void require_hyperbolic() const { require(genus >= 2, "genus must be >= 2 (got " + std::to_string(genus) + ")"); }
};

/// h0 of a line bundle of given degree: certain bounds plus the generic value.
struct SectionCount {
  long lower = 0;
  long generic = 0;
  long upper = 0;
  bool operator==(const SectionCount &) const = default;
  bool exact() const { return lower == upper; }
};

/// Which named bundle to evaluate in the special range.
enum class SpecialBundle { none, trivial, canonical };

/// chi(E) = deg E + rank (1 - g).
inline long chi_bundle(const CurveContext &ctx, long rank, long degree) {
  require(rank >= 1, "chi_bundle: rank must be >= 1");
  return degree + rank * (1 - ctx.genus);
}

/// Sections of a degree-d line bundle.  In 0 <= d <= 2g-2 the answer depends on
/// the bundle: lower/generic follow Riemann-Roch, upper is Clifford's bound.
/// Passing `trivial` (d = 0) or `canonical` (d = 2g-2) pins that bundle's value.
inline SectionCount h0_line_bundle(const CurveContext &ctx, long d, SpecialBundle which = SpecialBundle::none) {
  const long g = ctx.genus;
  if (d < 0) return {0, 0, 0};
  if (d > 2 * g - 2) return {d - g + 1, d - g + 1, d - g + 1};
  if (which == SpecialBundle::trivial) {
    require(d == 0, "h0_line_bundle: trivial bundle has degree 0");
    return {1, 1, 1};
  }
  if (which == SpecialBundle::canonical) {
    require(d == 2 * g - 2, "h0_line_bundle: canonical bundle has degree 2g-2");
    return {g, g, g};
  }
  const long rr = std::max(0L, d - g + 1);
  return {rr, rr, d / 2 + 1};
}

/// P_t of the m-th symmetric product of the curve: the q^m coefficient of
/// (1 + q t)^{2g} / ((1 - q)(1 - q t^2)).
inline Polynomial sym_product_poincare(const CurveContext &ctx, long m) {
  require(m >= 0, "sym_product_poincare: m must be >= 0");
  const long g2 = 2 * ctx.genus;
  // q^m t^k collects C(2g, i) from (1+qt)^{2g}, q^j t^{2j} from 1/(1-qt^2)
  // and q^{m-i-j} from 1/(1-q).
  std::vector<Integer> c(static_cast<std::size_t>(2 * m + 1));
  for (long i = 0; i <= std::min(m, g2); ++i)
    for (long j = 0; i + j <= m; ++j) c[static_cast<std::size_t>(i + 2 * j)] += binomial(g2, i);
  return Polynomial(std::move(c));
}

/// P_t(Jac) = (1 + t)^{2g}.
inline Polynomial jacobian_poincare(const CurveContext &ctx) {
  return Polynomial{1, 1}.pow(static_cast<unsigned>(2 * ctx.genus));
}

} // namespace higgsmorse
