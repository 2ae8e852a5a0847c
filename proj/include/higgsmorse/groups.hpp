#pragma once

// Cartan data of the supported real reductive groups and their Higgs-field shapes.

#include <complex>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "higgsmorse/errors.hpp"

namespace higgsmorse {

enum class GroupKind { GLnC, SLnC, SLnR, Sp2nR, Upq };

/// One component of the Higgs field as a bundle map source -> target (x) K.
struct HiggsComponent {
  std::string tag;      // phi, beta or gamma
  std::string source;   // e.g. "V", "V*", "V1"
  std::string target;   // target before the K twist
  std::string symmetry; // "none", "symmetric", "symmetric, traceless", "traceless"
  bool k_twisted = true;
};

struct GroupDatum {
  GroupKind kind = GroupKind::GLnC;
  int n = 1; // for U(p,q): p
  int q = 0; // only for U(p,q)
  std::string name;
  std::string maximal_compact;
  std::string complexified_compact;
  std::string isotropy;        // m^C as an H^C-representation
  long isotropy_dim = 0;       // complex dimension of m^C
  std::string bundle_data;     // what the structure-group reduction becomes
  std::vector<HiggsComponent> higgs_shape;

  /// Rank of the standard representation.
  int standard_rank() const {
    switch (kind) {
    case GroupKind::Sp2nR: return 2 * n;
    case GroupKind::Upq: return n + q;
    default: return n;
    }
  }
  /// Hermitian type groups carry a Toledo invariant.
  bool hermitian_type() const { return kind == GroupKind::Sp2nR || kind == GroupKind::Upq; }
  bool operator==(const GroupDatum &o) const { return kind == o.kind && n == o.n && q == o.q; }
};

inline GroupDatum group_datum(GroupKind kind, int n, int q = 0) {
  require(n >= 1, "group_datum: n must be >= 1");
  GroupDatum d;
  d.kind = kind;
  d.n = n;
  d.q = q;
  const std::string N = std::to_string(n);
  switch (kind) {
  case GroupKind::GLnC:
    d.name = "GL(" + N + ",C)";
    d.maximal_compact = "U(" + N + ")";
    d.complexified_compact = "GL(" + N + ",C)";
    d.isotropy = "gl(" + N + ",C)";
    d.isotropy_dim = long(n) * n;
    d.bundle_data = "rank " + N + " vector bundle V";
    d.higgs_shape = {{"phi", "V", "V", "none", true}};
    break;
  case GroupKind::SLnC:
    d.name = "SL(" + N + ",C)";
    d.maximal_compact = "SU(" + N + ")";
    d.complexified_compact = "SL(" + N + ",C)";
    d.isotropy = "sl(" + N + ",C)";
    d.isotropy_dim = long(n) * n - 1;
    d.bundle_data = "rank " + N + " vector bundle V, trivial determinant";
    d.higgs_shape = {{"phi", "V", "V", "traceless", true}};
    break;
  case GroupKind::SLnR:
    d.name = "SL(" + N + ",R)";
    d.maximal_compact = "SO(" + N + ")";
    d.complexified_compact = "SO(" + N + ",C)";
    d.isotropy = "Hom_sym,0(C^" + N + ",C^" + N + ")";
    d.isotropy_dim = long(n) * (n + 1) / 2 - 1;
    d.bundle_data = "orthogonal rank " + N + " bundle (V, Q), trivial determinant";
    d.higgs_shape = {{"phi", "V", "V", "symmetric, traceless", true}};
    break;
  case GroupKind::Sp2nR:
    d.name = "Sp(" + std::to_string(2 * n) + ",R)";
    d.maximal_compact = "U(" + N + ")";
    d.complexified_compact = "GL(" + N + ",C)";
    d.isotropy = "Sym^2 C^" + N + " + Sym^2 (C^" + N + ")*";
    d.isotropy_dim = long(n) * (n + 1);
    d.bundle_data = "rank " + N + " vector bundle V";
    d.higgs_shape = {{"beta", "V*", "V", "symmetric", true}, {"gamma", "V", "V*", "symmetric", true}};
    break;
  case GroupKind::Upq: {
    require(q >= 1, "group_datum: U(p,q) needs q >= 1");
    const std::string P = N, Q = std::to_string(q);
    d.name = "U(" + P + "," + Q + ")";
    d.maximal_compact = "U(" + P + ") x U(" + Q + ")";
    d.complexified_compact = "GL(" + P + ",C) x GL(" + Q + ",C)";
    d.isotropy = "Hom(C^" + P + ",C^" + Q + ") + Hom(C^" + Q + ",C^" + P + ")";
    d.isotropy_dim = 2L * n * q;
    d.bundle_data = "vector bundles V1 (rank " + P + ") and V2 (rank " + Q + ")";
    d.higgs_shape = {{"beta", "V1", "V2", "none", true}, {"gamma", "V2", "V1", "none", true}};
    break;
  }
  }
  return d;
}

/// Parse "gl(n)", "sl(n)", "sl(n,R)", "sp(2n,R)", "u(p,q)" given explicit parameters.
inline GroupDatum parse_group(const std::string &id, int n, int p = 0, int q = 0) {
  if (id == "gl(n)") return group_datum(GroupKind::GLnC, n);
  if (id == "sl(n)") return group_datum(GroupKind::SLnC, n);
  if (id == "sl(n,R)") return group_datum(GroupKind::SLnR, n);
  if (id == "sp(2n,R)") return group_datum(GroupKind::Sp2nR, n);
  if (id == "u(p,q)") {
    require(p >= 1 && q >= 1, "u(p,q) requires --p and --q >= 1");
    return group_datum(GroupKind::Upq, p, q);
  }
  // Literal forms such as gl(2), sl(3,R), sp(4,R), u(2,1).
  auto inner = [&](const std::string &prefix, const std::string &suffix) -> std::string {
    if (id.rfind(prefix, 0) != 0 || id.size() < prefix.size() + suffix.size()) return {};
    if (id.compare(id.size() - suffix.size(), suffix.size(), suffix) != 0) return {};
    return id.substr(prefix.size(), id.size() - prefix.size() - suffix.size());
  };
  auto to_int = [&](const std::string &s) {
    require(!s.empty() && s.find_first_not_of("0123456789") == std::string::npos, "unsupported group identifier: " + id);
    return std::stoi(s);
  };
  if (auto s = inner("sp(", ",R)"); !s.empty()) {
    int m = to_int(s);
    require(m % 2 == 0, "sp(m,R) needs even m: " + id);
    return group_datum(GroupKind::Sp2nR, m / 2);
  }
  if (auto s = inner("sl(", ",R)"); !s.empty()) return group_datum(GroupKind::SLnR, to_int(s));
  if (auto s = inner("gl(", ")"); !s.empty()) return group_datum(GroupKind::GLnC, to_int(s));
  if (auto s = inner("sl(", ")"); !s.empty()) return group_datum(GroupKind::SLnC, to_int(s));
  if (auto s = inner("u(", ")"); !s.empty()) {
    auto comma = s.find(',');
    require(comma != std::string::npos, "unsupported group identifier: " + id);
    return group_datum(GroupKind::Upq, to_int(s.substr(0, comma)), to_int(s.substr(comma + 1)));
  }
  throw ValidationError("unsupported group identifier: " + id);
}

using CMatrix = Eigen::MatrixXcd;

enum class InvolutionKind { compact_conjugation_tau, cartan_theta };

/// u -> -u^* in the standard representation (both tau and theta take this form
/// on the matrix groups used here).
inline CMatrix apply_involution(InvolutionKind, const CMatrix &u) {
  require(u.rows() == u.cols(), "apply_involution: square matrix required");
  return -u.adjoint();
}

/// B(u, v) = tr(uv).
inline std::complex<double> trace_form(const CMatrix &u, const CMatrix &v) { return (u * v).trace(); }

/// B_tau(u, v) = -B(u, tau v) = tr(u v^*).
inline std::complex<double> b_tau(const CMatrix &u, const CMatrix &v) {
  return -trace_form(u, apply_involution(InvolutionKind::compact_conjugation_tau, v));
}

/// Random element of the real Lie algebra of `g` in its standard representation.
template <class Rng>
CMatrix real_form_sample(const GroupDatum &g, Rng &rng) {
  std::normal_distribution<double> nd;
  const int r = g.standard_rank();
  auto real = [&](int a, int b) {
    CMatrix m(a, b);
    for (int i = 0; i < a; ++i)
      for (int j = 0; j < b; ++j) m(i, j) = nd(rng);
    return m;
  };
  auto cplx = [&](int a, int b) {
    CMatrix m(a, b);
    for (int i = 0; i < a; ++i)
      for (int j = 0; j < b; ++j) m(i, j) = {nd(rng), nd(rng)};
    return m;
  };
  switch (g.kind) {
  case GroupKind::GLnC: return cplx(r, r);
  case GroupKind::SLnC: {
    CMatrix m = cplx(r, r);
    m -= (m.trace() / double(r)) * CMatrix::Identity(r, r);
    return m;
  }
  case GroupKind::SLnR: {
    CMatrix m = real(r, r);
    m -= (m.trace() / double(r)) * CMatrix::Identity(r, r);
    return m;
  }
  case GroupKind::Sp2nR: {
    const int n = g.n;
    CMatrix a = real(n, n), b = real(n, n), c = real(n, n);
    b = (b + b.transpose()).eval();
    c = (c + c.transpose()).eval();
    CMatrix m(r, r);
    m << a, b, c, -a.transpose();
    return m;
  }
  case GroupKind::Upq: {
    CMatrix a = cplx(g.n, g.n), d = cplx(g.q, g.q), b = cplx(g.n, g.q);
    a = (a - a.adjoint()).eval();
    d = (d - d.adjoint()).eval();
    CMatrix m(r, r);
    m << a, b, b.adjoint(), d;
    return m;
  }
  }
  return {};
}

/// Membership test for the real Lie algebra, to tolerance `tol`.
inline bool in_real_form(const GroupDatum &g, const CMatrix &x, double tol = 1e-12) {
  const int r = g.standard_rank();
  if (x.rows() != r || x.cols() != r) return false;
  switch (g.kind) {
  case GroupKind::GLnC: return true;
  case GroupKind::SLnC: return std::abs(x.trace()) <= tol;
  case GroupKind::SLnR: return x.imag().cwiseAbs().maxCoeff() <= tol && std::abs(x.trace()) <= tol;
  case GroupKind::Sp2nR: {
    CMatrix j = CMatrix::Zero(r, r);
    j.topRightCorner(g.n, g.n).setIdentity();
    j.bottomLeftCorner(g.n, g.n) = -CMatrix::Identity(g.n, g.n);
    return x.imag().cwiseAbs().maxCoeff() <= tol && (x.transpose() * j + j * x).cwiseAbs().maxCoeff() <= tol;
  }
  case GroupKind::Upq: {
    CMatrix ipq = CMatrix::Identity(r, r);
    ipq.bottomRightCorner(g.q, g.q) *= -1.0;
    return (x.adjoint() * ipq + ipq * x).cwiseAbs().maxCoeff() <= tol;
  }
  }
  return false;
}

} // namespace higgsmorse
