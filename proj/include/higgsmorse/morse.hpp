#pragma once

// Deformation-complex weight pieces, Morse indices and Poincare assembly.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "higgsmorse/algebra.hpp"
#include "higgsmorse/critical.hpp"
#include "higgsmorse/curve.hpp"

namespace higgsmorse {

/// A bundle summand of a weight piece: rank, degree and what it is.
struct Block {
  long rank = 0;
  long degree = 0;
  std::string what;
};

struct BundleDatum {
  long rank = 0;
  long degree = 0;
  bool operator==(const BundleDatum &) const = default;
};

/// C_mu : (E(h^C))_mu -> (E(m^C))_{mu+1} (x) K.
struct ComplexPiece {
  Weight mu{0};
  BundleDatum source;
  BundleDatum target; // already twisted by K
  std::vector<Block> source_blocks;
  std::vector<Block> target_blocks; // already twisted by K
};

namespace detail {

inline BundleDatum total(const std::vector<Block> &blocks) {
  BundleDatum b;
  for (auto &x : blocks) {
    b.rank += x.rank;
    b.degree += x.degree;
  }
  return b;
}

/// Hom(V_a, V_b), weight w_b - w_a.
inline void add_end_blocks(const HodgeType &h, std::map<Weight, std::vector<Block>> &out) {
  const auto &S = h.summands;
  for (std::size_t a = 0; a < S.size(); ++a)
    for (std::size_t b = 0; b < S.size(); ++b)
      out[S[b].weight - S[a].weight].push_back(
          {S[a].rank * S[b].rank, S[a].rank * S[b].degree - S[b].rank * S[a].degree, "Hom(" + S[a].name + "," + S[b].name + ")"});
}

/// Sym^2 V (weights w_a + w_b) and Sym^2 V* (weights -(w_a + w_b)).
inline void add_sym_blocks(const HodgeType &h, std::map<Weight, std::vector<Block>> &out) {
  const auto &S = h.summands;
  for (std::size_t a = 0; a < S.size(); ++a)
    for (std::size_t b = a; b < S.size(); ++b) {
      Block blk;
      if (a == b) {
        blk = {S[a].rank * (S[a].rank + 1) / 2, (S[a].rank + 1) * S[a].degree, "Sym2(" + S[a].name + ")"};
      } else {
        blk = {S[a].rank * S[b].rank, S[a].rank * S[b].degree + S[b].rank * S[a].degree, S[a].name + "(x)" + S[b].name};
      }
      const Weight w = S[a].weight + S[b].weight;
      out[w].push_back(blk);
      Block dual = blk;
      dual.degree = -blk.degree;
      dual.what = "(" + blk.what + ")*";
      out[-w].push_back(dual);
    }
}

} // namespace detail

inline std::vector<ComplexPiece> deformation_pieces(const HodgeType &h, const CurveContext &ctx) {
  require(check_hodge_fixed_point(h), "deformation_pieces: not an S^1-fixed Hodge type");
  std::map<Weight, std::vector<Block>> hc, mc;
  detail::add_end_blocks(h, hc);
  switch (h.group.kind) {
  case GroupKind::GLnC: detail::add_end_blocks(h, mc); break;
  case GroupKind::Sp2nR: detail::add_sym_blocks(h, mc); break;
  default: throw ValidationError("deformation_pieces: unsupported group routing for " + h.group.name);
  }
  std::map<Weight, ComplexPiece> pieces;
  for (auto &[w, blocks] : hc) {
    auto &p = pieces[w];
    p.mu = w;
    p.source_blocks = blocks;
  }
  const long K = ctx.canonical_degree();
  for (auto &[w, blocks] : mc) {
    auto &p = pieces[w - 1];
    p.mu = w - 1;
    for (auto b : blocks) {
      b.degree += b.rank * K;
      b.what += "(x)K";
      p.target_blocks.push_back(b);
    }
  }
  std::vector<ComplexPiece> out;
  for (auto &[w, p] : pieces) {
    p.source = detail::total(p.source_blocks);
    p.target = detail::total(p.target_blocks);
    out.push_back(std::move(p));
  }
  return out;
}

/// A route touches the block Hom(V_a, V_b) when it starts or ends at a or b.
inline bool generic_routing(const HodgeType &h, const ComplexPiece &p) {
  if (p.source_blocks.empty()) return false;
  // Each source block must be moved by ad(phi); with any route incident to its
  // summands the bracket is generically nonzero.
  for (const auto &blk : p.source_blocks) {
    bool touched = false;
    for (const auto &r : h.routes)
      for (std::size_t i : {r.source, r.target})
        if (blk.what.find("(" + h.summands[i].name + ",") != std::string::npos ||
            blk.what.find("," + h.summands[i].name + ")") != std::string::npos)
          touched = true;
    if (!touched) return false;
  }
  return true;
}

/// Necessary conditions for ad(phi) : source -> target to be an isomorphism.
inline bool piece_is_iso(const HodgeType &h, const ComplexPiece &p) {
  return p.source.rank > 0 && p.source == p.target && generic_routing(h, p);
}

struct WeightIndexEntry {
  Weight mu{0};
  long dim_h1 = 0;      // exact when status != "UNRESOLVED", else a lower bound
  std::string status;   // "isomorphism", "vanishing", "UNRESOLVED"
  BundleDatum source;
  BundleDatum target;
};

struct IndexReport {
  long index = 0; // exact when `exact`, else a lower bound
  bool exact = true;
  std::vector<WeightIndexEntry> per_weight;
};

/// index = 2 * sum_{mu > 0} dim H^1(C_mu).
inline IndexReport morse_index(const HodgeType &h, const CurveContext &ctx) {
  require(check_hodge_fixed_point(h), "morse_index: not an S^1-fixed Hodge type");
  IndexReport rep;
  const long K = ctx.canonical_degree();
  for (const auto &p : deformation_pieces(h, ctx)) {
    if (p.mu <= 0) continue;
    if (p.source.rank == 0 && p.target.rank == 0) continue;
    WeightIndexEntry e{p.mu, 0, "", p.source, p.target};
    const long chi_s = p.source.rank ? chi_bundle(ctx, p.source.rank, p.source.degree) : 0;
    const long chi_t = p.target.rank ? chi_bundle(ctx, p.target.rank, p.target.degree) : 0;
    e.dim_h1 = -chi_s + chi_t;
    if (piece_is_iso(h, p)) {
      e.status = "isomorphism";
      e.dim_h1 = 0;
    } else {
      const bool h0_zero = std::all_of(p.source_blocks.begin(), p.source_blocks.end(), [](const Block &b) { return b.degree < 0; });
      const bool h1t_zero = std::all_of(p.target_blocks.begin(), p.target_blocks.end(),
                                        [&](const Block &b) { return b.degree > b.rank * K; });
      if (h0_zero && h1t_zero) {
        e.status = "vanishing";
      } else {
        e.status = "UNRESOLVED";
        rep.exact = false;
      }
    }
    rep.index += 2 * e.dim_h1;
    rep.per_weight.push_back(e);
  }
  return rep;
}

struct MinimumCertificate {
  bool is_minimum = true;
  std::vector<std::string> lines;
};

/// Minimum iff ad(phi) is an isomorphism on every positive-weight piece.
inline MinimumCertificate is_local_minimum(const HodgeType &h, const CurveContext &ctx) {
  MinimumCertificate c;
  for (const auto &p : deformation_pieces(h, ctx)) {
    if (p.mu <= 0) continue;
    if (p.source.rank == 0 && p.target.rank == 0) continue;
    const bool ok = piece_is_iso(h, p);
    c.lines.push_back("mu=" + weight_string(p.mu) + " source(rank " + std::to_string(p.source.rank) + ", deg " +
                      std::to_string(p.source.degree) + ") target(rank " + std::to_string(p.target.rank) + ", deg " +
                      std::to_string(p.target.degree) + ") " + (ok ? "iso" : "not iso"));
    c.is_minimum = c.is_minimum && ok;
  }
  return c;
}

/// sum_N t^{index_N} P_t(N).
inline Polynomial poincare_assemble(const std::vector<std::pair<long, Polynomial>> &strata) {
  Polynomial acc;
  for (const auto &[index, p] : strata) {
    require(index >= 0, "poincare_assemble: negative index " + std::to_string(index));
    require(index % 2 == 0, "poincare_assemble: odd index " + std::to_string(index));
    acc += p.shifted(static_cast<std::size_t>(index));
  }
  return acc;
}

/// P_t of the critical submanifold of a GL(2) stratum: S^m X with m = d - 2l + 2g - 2,
/// optionally times Jac(X) for the non-fixed-determinant space.
inline Polynomial gl2_critical_poincare(const CurveContext &ctx, const CriticalStratum &s, bool with_jacobian = false) {
  require(s.label == StratumLabel::type_11 && s.parameter, "gl2_critical_poincare: needs a type_11 stratum");
  const long d = s.hodge.total_degree, l = *s.parameter;
  Polynomial p = sym_product_poincare(ctx, d - 2 * l + ctx.canonical_degree());
  return with_jacobian ? p * jacobian_poincare(ctx) : p;
}

/// GL(2) assembly with the N0 polynomial supplied externally.
inline Polynomial assemble_gl2(const CurveContext &ctx, long d, const Polynomial &n0, bool with_jacobian = false) {
  std::vector<std::pair<long, Polynomial>> terms;
  for (const auto &s : enumerate_gl2_critical(ctx, d).strata) {
    if (s.is_phi_zero) {
      terms.emplace_back(0, n0);
      continue;
    }
    auto rep = morse_index(s.hodge, ctx);
    if (!rep.exact) throw ConsistencyError("assemble_gl2: unresolved index on " + s.description);
    terms.emplace_back(rep.index, gl2_critical_poincare(ctx, s, with_jacobian));
  }
  return poincare_assemble(terms);
}

/// Fibre dimension of the negative normal set at the phi = 0 rank-2 split critical
/// point L1 + L2 (deg L1 = l): 2l - d + g - 1 + h0(L1^* L2 K), as an interval.
inline SectionCount gl2_negative_normal_dimension(const CurveContext &ctx, long l, long d) {
  require(2 * l > d, "gl2_negative_normal_dimension: needs deg L1 > deg E / 2");
  const long base = 2 * l - d + ctx.genus - 1;
  auto h0 = h0_line_bundle(ctx, d - 2 * l + ctx.canonical_degree());
  return {base + h0.lower, base + h0.generic, base + h0.upper};
}

struct DwwwSeries {
  long shift = 0;
  TruncatedSeries first;      // t^s (1+t)^{4g} / (1-t^2)^2
  TruncatedSeries second;     // t^s P_t(S^m X) (1+t)^{2g} / (1-t^2)
  TruncatedSeries difference; // first - second
};

/// Rank-2 equivariant series for the stratum with deg L1 = l in degree degE.
inline DwwwSeries dwww_difference(long l, long deg_e, const CurveContext &ctx, long order) {
  const long g = ctx.genus;
  const long s = 2 * l - deg_e + (g - 1);
  const long m = 2 * g - 2 + deg_e - 2 * l;
  require(s >= 0, "dwww_difference: negative shift " + std::to_string(s));
  require(m >= 0, "dwww_difference: negative symmetric-product index " + std::to_string(m));
  require(order >= s, "dwww_difference: truncation order below the shift");
  const auto N = static_cast<std::size_t>(order);
  const TruncatedSeries bu1 = series_geometric(2, order);
  const Polynomial jac = jacobian_poincare(ctx);
  DwwwSeries out;
  out.shift = s;
  out.first = series_shift(TruncatedSeries(jac * jac, N) * bu1 * bu1, s);
  out.second = series_shift(TruncatedSeries(sym_product_poincare(ctx, m) * jac, N) * bu1, s);
  out.difference = out.first - out.second;
  return out;
}

} // namespace higgsmorse
