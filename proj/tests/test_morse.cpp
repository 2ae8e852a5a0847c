#include <gtest/gtest.h>

#include "higgsmorse/morse.hpp"

using namespace higgsmorse;

namespace {

const ComplexPiece *piece_at(const std::vector<ComplexPiece> &ps, Weight mu) {
  for (const auto &p : ps)
    if (p.mu == mu) return &p;
  return nullptr;
}

// Riemann-Roch oracle: H^1 of a negative line bundle of degree e has dimension g - 1 - e.
long gl2_index_oracle(long g, long d, long l) {
  const long e = d - 2 * l;
  return 2 * (g - 1 - e);
}

// Oracle for the t^k coefficient of t^s (1+t)^{a} / (1-t^2)^b, from the binomial formula.
Integer rational_coeff(long k, long s, long a, long b) {
  Integer c = 0;
  for (long i = 0; i <= a && i <= k - s; ++i) {
    const long rest = k - s - i;
    if (rest % 2) continue;
    const long j = rest / 2;
    c += binomial(a, i) * binomial(j + b - 1, b - 1);
  }
  return c;
}

} // namespace

TEST(Pieces, Gl2Example) {
  const CurveContext ctx(2);
  const auto s = enumerate_gl2_critical(ctx, 1).strata[1];
  const auto ps = deformation_pieces(s.hodge, ctx);
  const auto *p1 = piece_at(ps, Weight(1));
  ASSERT_NE(p1, nullptr);
  EXPECT_EQ(p1->source, (BundleDatum{1, -1}));
  EXPECT_EQ(p1->target, (BundleDatum{0, 0}));
  const auto *p0 = piece_at(ps, Weight(0));
  ASSERT_NE(p0, nullptr);
  EXPECT_EQ(p0->source, (BundleDatum{2, 0}));
  EXPECT_EQ(p0->source_blocks.size(), 2u);
  EXPECT_EQ(p0->target, (BundleDatum{1, -1 + 2}));
}

TEST(Pieces, RankConservationGl) {
  for (long g = 2; g <= 4; ++g) {
    const CurveContext ctx(g);
    for (long d : {1, 2, 4}) {
      for (const auto &s : enumerate_gl3_critical(ctx, d).strata) {
        long src = 0, tgt = 0;
        for (const auto &p : deformation_pieces(s.hodge, ctx)) {
          src += p.source.rank;
          tgt += p.target.rank;
        }
        EXPECT_EQ(src, 9);
        EXPECT_EQ(tgt, 9);
      }
    }
  }
}

TEST(Pieces, SpSymSquareBlock) {
  const CurveContext ctx(2);
  const auto p = enumerate_sp2nR_minima(3, ctx, -3).strata[1].hodge;
  const auto ps = deformation_pieces(p, ctx);
  // Sym^2(V_w) sits in m at weight 2w, i.e. in the piece mu = 2w - 1.
  for (const auto &s : p.summands) {
    const auto *piece = piece_at(ps, 2 * s.weight - 1);
    ASSERT_NE(piece, nullptr);
    bool found = false;
    for (const auto &b : piece->target_blocks) found = found || b.what == "Sym2(" + s.name + ")(x)K";
    EXPECT_TRUE(found) << s.name;
  }
  long sym_rank = 0;
  for (const auto &pc : ps) sym_rank += pc.target.rank;
  EXPECT_EQ(sym_rank, 3 * 4);
}

TEST(Pieces, RejectsNonFixed) {
  HodgeType h;
  h.group = group_datum(GroupKind::GLnC, 2);
  h.summands = {{1, 1, Weight(0), "A"}, {1, 0, Weight(1), "B"}};
  h.routes = {{1, 0, RouteTag::phi}};
  EXPECT_THROW(deformation_pieces(h, CurveContext(2)), ValidationError);
  EXPECT_THROW(morse_index(h, CurveContext(2)), ValidationError);
  h.group = group_datum(GroupKind::SLnR, 2);
  h.routes = {{0, 1, RouteTag::phi}};
  EXPECT_THROW(deformation_pieces(h, CurveContext(2)), ValidationError);
}

TEST(Index, N0IsZero) {
  const CurveContext ctx(3);
  const auto s = enumerate_gl2_critical(ctx, 1).strata[0];
  const auto r = morse_index(s.hodge, ctx);
  EXPECT_EQ(r.index, 0);
  EXPECT_TRUE(r.exact);
  EXPECT_TRUE(is_local_minimum(s.hodge, ctx).is_minimum);
}

TEST(Index, Gl2Example) {
  const CurveContext ctx(2);
  const auto s = enumerate_gl2_critical(ctx, 1).strata[1];
  const auto r = morse_index(s.hodge, ctx);
  EXPECT_EQ(r.index, 4);
  EXPECT_TRUE(r.exact);
  ASSERT_EQ(r.per_weight.size(), 1u);
  EXPECT_EQ(r.per_weight[0].status, "vanishing");
  EXPECT_FALSE(is_local_minimum(s.hodge, ctx).is_minimum);
}

TEST(Index, Gl2MatchesOracle) {
  for (long g = 2; g <= 4; ++g)
    for (long d : {-3, -1, 1, 3}) {
      const CurveContext ctx(g);
      for (const auto &s : enumerate_gl2_critical(ctx, d).strata) {
        if (s.is_phi_zero) continue;
        const auto r = morse_index(s.hodge, ctx);
        EXPECT_TRUE(r.exact);
        EXPECT_EQ(r.index, gl2_index_oracle(g, d, *s.parameter));
        EXPECT_GT(r.index, 0);
        EXPECT_EQ(r.index % 2, 0);
      }
    }
}

TEST(Index, Gl3Type111Unresolved) {
  const CurveContext ctx(2);
  bool saw = false;
  for (const auto &s : enumerate_gl3_critical(ctx, 1).strata)
    if (s.label == StratumLabel::type_111) {
      const auto r = morse_index(s.hodge, ctx);
      EXPECT_GE(r.index, 0);
      EXPECT_EQ(r.index % 2, 0);
      if (!r.exact) {
        saw = true;
        bool flagged = false;
        for (const auto &e : r.per_weight) flagged = flagged || e.status == "UNRESOLVED";
        EXPECT_TRUE(flagged);
      }
    }
  EXPECT_TRUE(saw);
}

TEST(Index, SpMinimaHaveIndexZero) {
  for (long n = 1; n <= 3; ++n)
    for (long g = 2; g <= 3; ++g) {
      const CurveContext ctx(g);
      const long m = n * (g - 1);
      for (long d = -m; d <= m; ++d)
        for (const auto &s : enumerate_sp2nR_minima(n, ctx, d).strata) {
          const auto r = morse_index(s.hodge, ctx);
          EXPECT_EQ(r.index, 0) << s.description;
          EXPECT_TRUE(r.exact) << s.description;
          EXPECT_TRUE(is_local_minimum(s.hodge, ctx).is_minimum) << s.description;
        }
    }
}

TEST(Index, Sp4ChainsAreNotMinima) {
  const CurveContext ctx(2);
  const auto e = enumerate_sp4_chain_strata(ctx, 1);
  ASSERT_FALSE(e.strata.empty());
  for (const auto &s : e.strata) {
    const auto r = morse_index(s.hodge, ctx);
    EXPECT_GT(r.index, 0);
    EXPECT_FALSE(is_local_minimum(s.hodge, ctx).is_minimum);
    const auto cert = is_local_minimum(s.hodge, ctx);
    EXPECT_FALSE(cert.lines.empty());
  }
}

TEST(Assembly, Examples) {
  EXPECT_EQ(poincare_assemble({{0, Polynomial{1}}}), (Polynomial{1}));
  EXPECT_EQ(poincare_assemble({{0, Polynomial{1, 1}}, {2, Polynomial{1}}}), (Polynomial{1, 1, 1}));
  EXPECT_THROW(poincare_assemble({{1, Polynomial{1}}}), ValidationError);
  EXPECT_THROW(poincare_assemble({{-2, Polynomial{1}}}), ValidationError);
}

TEST(Assembly, PermutationInvariant) {
  std::vector<std::pair<long, Polynomial>> a = {{0, Polynomial{1, 2}}, {4, Polynomial{3}}, {2, Polynomial{0, 1}}};
  auto b = a;
  std::reverse(b.begin(), b.end());
  EXPECT_EQ(poincare_assemble(a), poincare_assemble(b));
  EXPECT_EQ(poincare_assemble(a), (Polynomial{1, 2, 0, 1, 3}));
}

TEST(Assembly, Gl2MatchesOracle) {
  const Polynomial n0 = Polynomial::parse("1 + 1*t^2 + 4*t^3");
  for (long g = 2; g <= 4; ++g)
    for (long d : {-1, 1, 3}) {
      const CurveContext ctx(g);
      Polynomial oracle = n0;
      for (long l = -20; l <= 20; ++l) {
        if (2 * l <= d || d - 2 * l + 2 * g - 2 < 0) continue;
        oracle += sym_product_poincare(ctx, d - 2 * l + 2 * g - 2).shifted(static_cast<std::size_t>(gl2_index_oracle(g, d, l)));
      }
      EXPECT_EQ(assemble_gl2(ctx, d, n0), oracle) << "g=" << g << " d=" << d;
    }
}

TEST(Assembly, Gl2Genus2Frozen) {
  // Single stratum l = 1: t^4 P(S^1 X) = t^4 (1 + 4t + t^2).
  EXPECT_EQ(assemble_gl2(CurveContext(2), 1, Polynomial{1}), (Polynomial{1, 0, 0, 0, 1, 4, 1}));
  const Polynomial with_jac = Polynomial{1} + (Polynomial{1, 4, 1} * Polynomial{1, 4, 6, 4, 1}).shifted(4);
  EXPECT_EQ(assemble_gl2(CurveContext(2), 1, Polynomial{1}, true), with_jac);
}

TEST(NegativeNormal, Example) {
  // g = 2, d = 1, l = 1: 2 - 1 + 1 = 2 plus h0 of a degree-1 bundle in [0, 1].
  EXPECT_EQ(gl2_negative_normal_dimension(CurveContext(2), 1, 1), (SectionCount{2, 2, 3}));
  EXPECT_THROW(gl2_negative_normal_dimension(CurveContext(2), 0, 1), ValidationError);
}

TEST(Dwww, FrozenExample) {
  const auto r = dwww_difference(1, 1, CurveContext(2), 4);
  EXPECT_EQ(r.shift, 2);
  EXPECT_EQ(r.first.to_string(), "1*t^2 + 8*t^3 + 30*t^4 + O(t^5)");
}

TEST(Dwww, MatchesBinomialOracle) {
  for (long g = 1; g <= 3; ++g) {
    const CurveContext ctx(g);
    for (long e = -3; e <= 3; ++e)
      for (long l = -6; l <= 6; ++l) {
        const long s = 2 * l - e + g - 1, m = 2 * g - 2 + e - 2 * l;
        if (s < 0 || m < 0) continue;
        const auto r = dwww_difference(l, e, ctx, 20);
        const auto sym = sym_product_poincare(ctx, m) * jacobian_poincare(ctx);
        for (long k = 0; k <= 20; ++k) {
          EXPECT_EQ(r.first[k], rational_coeff(k, s, 4 * g, 2));
          Integer second = 0;
          for (long i = 0; i <= sym.degree() && i <= k - s; ++i) {
            if ((k - s - i) % 2 == 0) second += sym[i];
          }
          EXPECT_EQ(r.second[k], second);
          EXPECT_EQ(r.difference[k], r.first[k] - r.second[k]);
        }
        EXPECT_TRUE(r.first.nonnegative());
        EXPECT_TRUE(r.second.nonnegative());
        EXPECT_TRUE(r.difference.nonnegative());
      }
  }
}

TEST(Dwww, Errors) {
  EXPECT_THROW(dwww_difference(0, 3, CurveContext(2), 20), ValidationError); // shift -2
  EXPECT_THROW(dwww_difference(3, 1, CurveContext(2), 20), ValidationError); // m = -3
  EXPECT_THROW(dwww_difference(1, 1, CurveContext(2), 1), ValidationError);
}
