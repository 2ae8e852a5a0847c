#pragma once

// Yang-Mills-Higgs functional on an N x N periodic lattice and the metric heat flow.
//
// Fields live on sites x = (i, j), stored site-major (index i + N j).  The bundle is
// trivial of rank n; the holomorphic structure is dbar + alpha (alpha a (0,1)-potential),
// phi is the (1,0) Higgs coefficient and h the Hermitian metric, the only evolving field.
//
//   D    = (D_x^+ - i D_y^+) / 2   forward differences, discrete d/dz
//   Dbar = (D_x^- + i D_y^-) / 2   backward differences, discrete d/dzbar
//
// so that D^dagger = -Dbar holds exactly on the lattice.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "higgsmorse/errors.hpp"
#include "higgsmorse/groups.hpp"

namespace higgsmorse {

using cplx = std::complex<double>;
using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 4, 4>;
using Field = std::vector<Mat>;

struct LatticeGeometry {
  int size = 8;
  double spacing = 1.0;

  LatticeGeometry() = default;
  LatticeGeometry(int n, double s) : size(n), spacing(s) {
    require(n >= 2, "lattice size must be >= 2");
    require(s > 0, "lattice spacing must be > 0");
  }
  int sites() const { return size * size; }
  double cell_area() const { return spacing * spacing; }
  double area() const { return sites() * cell_area(); }
  int index(int i, int j) const {
    i = ((i % size) + size) % size;
    j = ((j % size) + size) % size;
    return i + size * j;
  }
  int shift(int k, int di, int dj) const { return index(k % size + di, k / size + dj); }
};

/// Which group the metric flow runs in.  The real forms use the Cayley-adapted basis
/// V = L + L^{-1}: alpha diagonal traceless, h diagonal with det 1, phi off-diagonal.
enum class FlowGroup { gl, sl, sl2r, sp2r };

inline std::string flow_group_name(FlowGroup g) {
  switch (g) {
  case FlowGroup::gl: return "gl";
  case FlowGroup::sl: return "sl";
  case FlowGroup::sl2r: return "sl2r";
  case FlowGroup::sp2r: return "sp2r";
  }
  return "?";
}

inline FlowGroup parse_flow_group(const std::string &s) {
  if (s == "gl" || s == "gl(n)") return FlowGroup::gl;
  if (s == "sl" || s == "sl(n)") return FlowGroup::sl;
  if (s == "sl2r" || s == "sl(2,R)" || s == "sl(n,R)") return FlowGroup::sl2r;
  if (s == "sp2r" || s == "sp(2,R)" || s == "sp(2n,R)") return FlowGroup::sp2r;
  throw ValidationError("unsupported flow group tag: " + s);
}

inline bool is_real_form(FlowGroup g) { return g == FlowGroup::sl2r || g == FlowGroup::sp2r; }

struct FlowState {
  LatticeGeometry geometry;
  int rank = 1;
  Field alpha; // fixed
  Field phi;   // fixed
  Field h;     // evolves
  Mat flux;    // constant Hermitian background, default 0
  FlowGroup group = FlowGroup::gl;

  double lambda() const { return flux.trace().real() / rank; }
};

inline FlowState zero_state(const LatticeGeometry &geom, int rank, FlowGroup group = FlowGroup::gl) {
  require(rank >= 1 && rank <= 4, "flow rank must be in 1..4");
  if (is_real_form(group)) require(rank == 2, "real-form flow tags need rank 2");
  FlowState s;
  s.geometry = geom;
  s.rank = rank;
  s.group = group;
  s.alpha.assign(geom.sites(), Mat::Zero(rank, rank));
  s.phi.assign(geom.sites(), Mat::Zero(rank, rank));
  s.h.assign(geom.sites(), Mat::Identity(rank, rank));
  s.flux = Mat::Zero(rank, rank);
  return s;
}

namespace detail {

inline bool is_diagonal(const Mat &m) {
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != cplx(0)) return false;
  return true;
}

/// f applied to a Hermitian matrix through its spectral decomposition.
template <class F>
Mat herm_apply(const Mat &a, F f) {
  const int n = static_cast<int>(a.rows());
  if (is_diagonal(a)) {
    Mat r = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) r(i, i) = f(a(i, i).real());
    return r;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  const auto &ev = es.eigenvalues();
  Mat d = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) d(i, i) = f(ev(i));
  Mat r = es.eigenvectors() * d * es.eigenvectors().adjoint();
  return 0.5 * (r + r.adjoint());
}

inline double min_eigenvalue(const Mat &a) {
  if (is_diagonal(a)) {
    double m = a(0, 0).real();
    for (int i = 1; i < a.rows(); ++i) m = std::min(m, a(i, i).real());
    return m;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline Mat comm(const Mat &a, const Mat &b) { return a * b - b * a; }

/// Per-site metric data: h^-1, h^{1/2}, h^{-1/2} and the (1,0) Chern form coefficient.
struct MetricCache {
  Field inv, sqrt, isqrt, chern;
};

inline MetricCache metric_cache(const FlowState &s) {
  const auto &G = s.geometry;
  const int N = G.sites();
  MetricCache c;
  c.inv.resize(N);
  c.sqrt.resize(N);
  c.isqrt.resize(N);
  c.chern.resize(N);
  for (int k = 0; k < N; ++k) {
    c.sqrt[k] = herm_apply(s.h[k], [](double x) { return std::sqrt(x); });
    c.isqrt[k] = herm_apply(s.h[k], [](double x) { return 1.0 / std::sqrt(x); });
    c.inv[k] = herm_apply(s.h[k], [](double x) { return 1.0 / x; });
  }
  // Lattice transport of log h: L_e = h^{-1/2} log(h^{-1/2} h(x+e) h^{-1/2}) h^{1/2} / spacing.
  for (int k = 0; k < N; ++k) {
    auto L = [&](int nb) {
      Mat a = c.isqrt[k] * s.h[nb] * c.isqrt[k];
      a = 0.5 * (a + a.adjoint());
      return Mat(c.isqrt[k] * herm_apply(a, [](double x) { return std::log(x); }) * c.sqrt[k] / G.spacing);
    };
    const Mat lx = L(G.shift(k, 1, 0)), ly = L(G.shift(k, 0, 1));
    c.chern[k] = 0.5 * (lx - cplx(0, 1) * ly);
  }
  return c;
}

inline Mat d_forward(const LatticeGeometry &G, const Field &f, int k) {
  return (0.5 / G.spacing) * ((f[G.shift(k, 1, 0)] - f[k]) - cplx(0, 1) * (f[G.shift(k, 0, 1)] - f[k]));
}

inline Mat dbar_backward(const LatticeGeometry &G, const Field &f, int k) {
  return (0.5 / G.spacing) * ((f[k] - f[G.shift(k, -1, 0)]) + cplx(0, 1) * (f[k] - f[G.shift(k, 0, -1)]));
}

inline Mat h_adjoint(const Mat &x, const Mat &h, const Mat &hinv) { return hinv * x.adjoint() * h; }

inline Mat h_selfadjoint_part(const Mat &x, const Mat &h, const Mat &hinv) {
  return 0.5 * (x + h_adjoint(x, h, hinv));
}

/// |X|_h^2 = tr(X h^-1 X^* h).
inline double h_norm2(const Mat &x, const Mat &h, const Mat &hinv) { return (x * hinv * x.adjoint() * h).trace().real(); }

} // namespace detail

/// Everything derived from a state at fixed h.
struct FlowEval {
  detail::MetricCache cache;
  Field beta;     // (1,0) part of the Chern connection
  Field curv;     // Dalpha - Dbar beta + [beta, alpha]
  Field bracket;  // [phi, h^-1 phi^* h]
  Field mu;       // h-selfadjoint part of 2(curv + bracket), plus flux
  Field dbarphi;  // Dbar phi + [alpha, phi]
  double energy = 0;      // restricted
  double energy_full = 0; // restricted + 4 ||dbar phi||^2
};

inline FlowEval evaluate(const FlowState &s) {
  const auto &G = s.geometry;
  const int N = G.sites();
  FlowEval e;
  e.cache = detail::metric_cache(s);
  const auto &C = e.cache;
  e.beta.resize(N);
  for (int k = 0; k < N; ++k) e.beta[k] = C.chern[k] - C.inv[k] * s.alpha[k].adjoint() * s.h[k];
  e.curv.resize(N);
  e.bracket.resize(N);
  e.mu.resize(N);
  e.dbarphi.resize(N);
  double E = 0, Ephi = 0;
  for (int k = 0; k < N; ++k) {
    e.curv[k] = detail::d_forward(G, s.alpha, k) - detail::dbar_backward(G, e.beta, k) + detail::comm(e.beta[k], s.alpha[k]);
    e.bracket[k] = detail::comm(s.phi[k], detail::h_adjoint(s.phi[k], s.h[k], C.inv[k]));
    e.mu[k] = 2.0 * detail::h_selfadjoint_part(e.curv[k] + e.bracket[k], s.h[k], C.inv[k]) + s.flux;
    e.dbarphi[k] = detail::dbar_backward(G, s.phi, k) + detail::comm(s.alpha[k], s.phi[k]);
    E += detail::h_norm2(e.mu[k], s.h[k], C.inv[k]);
    Ephi += detail::h_norm2(e.dbarphi[k], s.h[k], C.inv[k]);
  }
  e.energy = G.cell_area() * E;
  e.energy_full = e.energy + 4.0 * G.cell_area() * Ephi;
  return e;
}

enum class EnergyVariant { restricted, full };

inline double ymh_energy(const FlowState &s, EnergyVariant v = EnergyVariant::restricted) {
  auto e = evaluate(s);
  return v == EnergyVariant::restricted ? e.energy : e.energy_full;
}

struct MomentMaps {
  Field mu1;        // real moment map (h-selfadjoint)
  Field mu_c;       // 2i dbar phi
  Field mu2, mu3;   // mu_c = mu2 + i mu3, both h-selfadjoint
  /// Component norms ||mu1||^2, ||mu2||^2, ||mu3||^2 (cell-area weighted, h-norm).
  double n1 = 0, n2 = 0, n3 = 0;
};

inline MomentMaps moment_maps(const FlowState &s) {
  auto e = evaluate(s);
  const auto &C = e.cache;
  const int N = s.geometry.sites();
  MomentMaps m;
  m.mu1 = e.mu;
  m.mu_c.resize(N);
  m.mu2.resize(N);
  m.mu3.resize(N);
  for (int k = 0; k < N; ++k) {
    m.mu_c[k] = cplx(0, 2) * e.dbarphi[k];
    m.mu2[k] = detail::h_selfadjoint_part(m.mu_c[k], s.h[k], C.inv[k]);
    m.mu3[k] = detail::h_selfadjoint_part(cplx(0, -1) * m.mu_c[k], s.h[k], C.inv[k]);
    m.n1 += detail::h_norm2(m.mu1[k], s.h[k], C.inv[k]);
    m.n2 += detail::h_norm2(m.mu2[k], s.h[k], C.inv[k]);
    m.n3 += detail::h_norm2(m.mu3[k], s.h[k], C.inv[k]);
  }
  const double a = s.geometry.cell_area();
  m.n1 *= a;
  m.n2 *= a;
  m.n3 *= a;
  return m;
}

/// Terms of the expanded functional: ||F||^2 + ||[phi,phi*]||^2 + 2 Re<F,[phi,phi*]> + 4||dbar phi||^2.
struct EnergyExpansion {
  double curvature = 0, bracket = 0, cross = 0, holomorphic = 0;
  double total() const { return curvature + bracket + 2 * cross + 4 * holomorphic; }
};

inline EnergyExpansion energy_expansion(const FlowState &s) {
  auto e = evaluate(s);
  const auto &C = e.cache;
  EnergyExpansion x;
  for (int k = 0; k < s.geometry.sites(); ++k) {
    const Mat f = 2.0 * detail::h_selfadjoint_part(e.curv[k], s.h[k], C.inv[k]) + s.flux;
    const Mat b = 2.0 * detail::h_selfadjoint_part(e.bracket[k], s.h[k], C.inv[k]);
    x.curvature += detail::h_norm2(f, s.h[k], C.inv[k]);
    x.bracket += detail::h_norm2(b, s.h[k], C.inv[k]);
    x.cross += (f * C.inv[k] * b.adjoint() * s.h[k]).trace().real();
    x.holomorphic += detail::h_norm2(e.dbarphi[k], s.h[k], C.inv[k]);
  }
  const double a = s.geometry.cell_area();
  x.curvature *= a;
  x.bracket *= a;
  x.cross *= a;
  x.holomorphic *= a;
  return x;
}

/// Tangent vector (delta alpha, delta phi).
struct Tangent {
  Field dalpha, dphi;
};

/// L2 pairing Re sum cell_area tr(a b^*).
inline double l2_inner(const LatticeGeometry &G, const Tangent &a, const Tangent &b) {
  double acc = 0;
  for (std::size_t k = 0; k < a.dalpha.size(); ++k) {
    acc += (a.dalpha[k] * b.dalpha[k].adjoint()).trace().real();
    acc += (a.dphi[k] * b.dphi[k].adjoint()).trace().real();
  }
  return G.cell_area() * acc;
}

/// Gradient of the restricted energy in (alpha, phi) at fixed h for the L2 pairing:
/// dE(da, dphi) = l2_inner(grad, (da, dphi)).
inline Tangent ymh_gradient(const FlowState &s, const FlowEval &e) {
  const auto &G = s.geometry;
  const int N = G.sites();
  const auto &C = e.cache;
  // dE = 2 Re sum area tr(dM Gamma^*), Gamma = mu^* + h mu h^-1.
  Field gamma(N), X(N);
  for (int k = 0; k < N; ++k) gamma[k] = e.mu[k].adjoint() + s.h[k] * e.mu[k] * C.inv[k];
  for (int k = 0; k < N; ++k) X[k] = detail::d_forward(G, gamma, k) + detail::comm(gamma[k], s.alpha[k].adjoint());
  Tangent g;
  g.dalpha.resize(N);
  g.dphi.resize(N);
  for (int k = 0; k < N; ++k) {
    const Mat &h = s.h[k], &hi = C.inv[k];
    g.dalpha[k] = 2.0 * (-detail::dbar_backward(G, gamma, k) + detail::comm(e.beta[k].adjoint(), gamma[k]) - h * X[k].adjoint() * hi);
    g.dphi[k] = 2.0 * (detail::comm(gamma[k], h * s.phi[k] * hi) + h * detail::comm(gamma[k].adjoint(), s.phi[k]) * hi);
  }
  return g;
}

inline Tangent ymh_gradient(const FlowState &s) { return ymh_gradient(s, evaluate(s)); }

inline double gradient_norm(const FlowState &s, const Tangent &g) { return std::sqrt(l2_inner(s.geometry, g, g)); }

/// Max over sites of the distance of (alpha, phi, h) from the Cayley-basis real-form locus.
inline double real_form_violation(const FlowState &s) {
  double dev = 0;
  for (int k = 0; k < s.geometry.sites(); ++k) {
    const Mat &a = s.alpha[k], &p = s.phi[k], &h = s.h[k];
    for (int i = 0; i < s.rank; ++i)
      for (int j = 0; j < s.rank; ++j) {
        if (i != j) dev = std::max({dev, std::abs(a(i, j)), std::abs(h(i, j))});
        else dev = std::max(dev, std::abs(p(i, j)));
      }
    dev = std::max(dev, std::abs(a.trace()));
    dev = std::max(dev, std::abs(h.determinant() - cplx(1)));
  }
  return dev;
}

// ---------------------------------------------------------------------------
// Random and constructed states.

struct RandomStateOptions {
  double alpha_amplitude = 0.15;
  double phi_amplitude = 0.15;
  double metric_amplitude = 0.2;
  double phi_constant = 0.5; // constant non-normal Higgs component
  int modes = 1;             // Fourier modes |k| <= modes per direction
};

namespace detail {

template <class Rng>
Mat random_matrix(int n, Rng &rng, double amp) {
  std::normal_distribution<double> nd;
  Mat m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = amp * cplx(nd(rng), nd(rng));
  return m;
}

/// Keep the entries the group allows: real forms have diagonal potentials/metric logs
/// and off-diagonal Higgs fields; sl removes traces.
inline Mat restrict_shape(FlowGroup g, const Mat &m, bool higgs, bool hermitian) {
  const int n = static_cast<int>(m.rows());
  Mat r = m;
  if (is_real_form(g)) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if ((i == j) == higgs) r(i, j) = 0;
  }
  if (hermitian) r = 0.5 * (r + r.adjoint());
  if (g != FlowGroup::gl && !higgs) r -= (r.trace() / double(n)) * Mat::Identity(n, n);
  return r;
}

template <class Rng>
Field random_field(const LatticeGeometry &G, int n, Rng &rng, double amp, int modes, FlowGroup g, bool higgs, bool hermitian) {
  Field f(G.sites(), Mat::Zero(n, n));
  const double two_pi = 2.0 * std::acos(-1.0);
  const double per_mode = amp / std::sqrt(double((2 * modes + 1) * (2 * modes + 1) - 1));
  for (int kx = -modes; kx <= modes; ++kx)
    for (int ky = -modes; ky <= modes; ++ky) {
      if (kx == 0 && ky == 0) continue;
      const Mat c = random_matrix(n, rng, per_mode);
      for (int k = 0; k < G.sites(); ++k) {
        const double th = two_pi * (kx * (k % G.size) + ky * (k / G.size)) / G.size;
        f[k] += std::exp(cplx(0, th)) * c;
      }
    }
  for (auto &m : f) m = restrict_shape(g, m, higgs, hermitian);
  return f;
}

} // namespace detail

/// Low-mode random state; identical (geometry, rank, group, seed, options) give identical states.
inline FlowState random_state(const LatticeGeometry &G, int rank, std::uint64_t seed, FlowGroup group = FlowGroup::gl,
                              const RandomStateOptions &o = {}) {
  FlowState s = zero_state(G, rank, group);
  std::mt19937_64 rng(seed);
  s.alpha = detail::random_field(G, rank, rng, o.alpha_amplitude, o.modes, group, false, false);
  s.phi = detail::random_field(G, rank, rng, o.phi_amplitude, o.modes, group, true, false);
  const Mat c = detail::restrict_shape(group, detail::random_matrix(rank, rng, o.phi_constant), true, false);
  for (auto &p : s.phi) p += c;
  const Field H = detail::random_field(G, rank, rng, o.metric_amplitude, o.modes, group, false, true);
  for (int k = 0; k < G.sites(); ++k) s.h[k] = detail::herm_apply(H[k], [](double x) { return std::exp(x); });
  return s;
}

/// Two-block Hodge configuration: V = V_0 + V_1 (ranks r0, r1), alpha and h block diagonal,
/// phi mapping V_0 to V_1.  Weights {0 on V_0, 1 on V_1}.
inline FlowState hodge_two_block_state(const LatticeGeometry &G, int r0, int r1, std::uint64_t seed) {
  require(r0 >= 1 && r1 >= 1 && r0 + r1 <= 4, "hodge_two_block_state: need r0, r1 >= 1 and r0 + r1 <= 4");
  FlowState s = random_state(G, r0 + r1, seed);
  for (int k = 0; k < G.sites(); ++k) {
    s.alpha[k].block(0, r0, r0, r1).setZero();
    s.alpha[k].block(r0, 0, r1, r0).setZero();
    s.h[k].block(0, r0, r0, r1).setZero();
    s.h[k].block(r0, 0, r1, r0).setZero();
    s.phi[k].block(0, 0, r0, r0).setZero();
    s.phi[k].block(0, r0, r0, r1).setZero();
    s.phi[k].block(r0, r0, r1, r1).setZero();
  }
  return s;
}

/// Spatially constant unitary gauge transformation applied to every field.
inline FlowState gauge_transform(const FlowState &s, const Mat &u) {
  FlowState t = s;
  const Mat ui = u.adjoint();
  for (int k = 0; k < s.geometry.sites(); ++k) {
    t.alpha[k] = u * s.alpha[k] * ui;
    t.phi[k] = u * s.phi[k] * ui;
    t.h[k] = u * s.h[k] * ui;
  }
  t.flux = u * s.flux * ui;
  return t;
}

template <class Rng>
Mat random_unitary(int n, Rng &rng) {
  Eigen::HouseholderQR<Mat> qr(detail::random_matrix(n, rng, 1.0));
  Mat q = qr.householderQ();
  return q;
}

// ---------------------------------------------------------------------------
// S^1 action.

struct S1Report {
  double energy_rel_diff = 0;
  double full_energy_rel_diff = 0;
  double phi_norm_rel_diff = 0;
  std::optional<double> fixed_point_residual; // only with weights
};

inline double phi_l2_norm(const FlowState &s) {
  double a = 0;
  for (const auto &p : s.phi) a += p.squaredNorm();
  return std::sqrt(s.geometry.cell_area() * a);
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

/// Compares (A, e^{i theta} phi) with (A, phi); with weights w, also compares it with
/// exp(i theta Psi).(A, phi), Psi = diag(i w), acting by g = diag(e^{i theta w}).
inline S1Report s1_action_check(const FlowState &s, double theta, const std::optional<std::vector<double>> &weights = {}) {
  S1Report r;
  FlowState rot = s;
  const cplx ph = std::exp(cplx(0, theta));
  for (auto &p : rot.phi) p *= ph;
  const auto e0 = evaluate(s), e1 = evaluate(rot);
  r.energy_rel_diff = rel_diff(e0.energy, e1.energy);
  r.full_energy_rel_diff = rel_diff(e0.energy_full, e1.energy_full);
  r.phi_norm_rel_diff = rel_diff(phi_l2_norm(s), phi_l2_norm(rot));
  if (weights) {
    require(static_cast<int>(weights->size()) == s.rank, "s1_action_check: one weight per basis vector");
    Mat g = Mat::Zero(s.rank, s.rank), gi = Mat::Zero(s.rank, s.rank);
    for (int i = 0; i < s.rank; ++i) {
      g(i, i) = std::exp(cplx(0, theta * (*weights)[i]));
      gi(i, i) = std::conj(g(i, i));
    }
    double res = 0;
    for (int k = 0; k < s.geometry.sites(); ++k) {
      res = std::max(res, (g * s.phi[k] * gi - rot.phi[k]).cwiseAbs().maxCoeff());
      res = std::max(res, (g * s.alpha[k] * gi - s.alpha[k]).cwiseAbs().maxCoeff());
      res = std::max(res, (g * s.h[k] * gi - s.h[k]).cwiseAbs().maxCoeff());
    }
    r.fixed_point_residual = res;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Limit classification.

struct EigenCluster {
  double mean = 0;
  double spread = 0;
  int multiplicity = 0;
};

struct LimitReport {
  std::vector<EigenCluster> clusters;
  double max_spread = 0;
  double threshold = 1e-4;
};

/// Per-site eigenvalues of mu, the k-th smallest collected across sites; neighbouring
/// collections whose means agree within the threshold merge into one cluster.
inline LimitReport classify_limit(const FlowState &s, double threshold = 1e-4) {
  const auto e = evaluate(s);
  const int n = s.rank;
  std::vector<std::vector<double>> by_index(n);
  for (int k = 0; k < s.geometry.sites(); ++k) {
    Mat herm = e.cache.sqrt[k] * e.mu[k] * e.cache.isqrt[k];
    herm = 0.5 * (herm + herm.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(herm, Eigen::EigenvaluesOnly);
    for (int i = 0; i < n; ++i) by_index[i].push_back(es.eigenvalues()(i));
  }
  LimitReport r;
  r.threshold = threshold;
  for (int i = 0; i < n; ++i) {
    const auto [lo, hi] = std::minmax_element(by_index[i].begin(), by_index[i].end());
    double mean = 0;
    for (double v : by_index[i]) mean += v;
    mean /= by_index[i].size();
    const double spread = *hi - *lo;
    r.max_spread = std::max(r.max_spread, spread);
    if (!r.clusters.empty() && std::abs(r.clusters.back().mean - mean) < threshold) {
      auto &c = r.clusters.back();
      c.mean = (c.mean * c.multiplicity + mean) / (c.multiplicity + 1);
      c.spread = std::max(c.spread, spread);
      ++c.multiplicity;
    } else {
      r.clusters.push_back({mean, spread, 1});
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Heat flow on the metric.

struct FlowOptions {
  double tolerance = 1e-6;
  long max_steps = 20000;
  std::optional<double> initial_step; // default 1e-2 * spacing^2
  double growth = 1.25;
  double max_step_factor = 25.0;
  double underflow = 1e-12;
};

struct FlowStep {
  double time = 0;
  double energy = 0;
  double gradient_norm = 0;
  double step = 0;
};

struct FlowTrace {
  std::vector<FlowStep> steps;
  bool converged = false;
  LimitReport limit_report;
};

namespace detail {

/// Hermitian generator Y = herm(h^{1/2} (mu - lambda) h^{-1/2}), projected to the group.
inline Field flow_generator(const FlowState &s, const FlowEval &e, FlowGroup g) {
  const int n = s.rank;
  const double lam = s.lambda();
  Field Y(s.geometry.sites());
  for (int k = 0; k < s.geometry.sites(); ++k) {
    Mat y = e.cache.sqrt[k] * (e.mu[k] - lam * Mat::Identity(n, n)) * e.cache.isqrt[k];
    y = 0.5 * (y + y.adjoint());
    if (g != FlowGroup::gl) y -= (y.trace() / double(n)) * Mat::Identity(n, n);
    if (is_real_form(g))
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) y(i, j) = 0;
    Y[k] = y;
  }
  return Y;
}

/// h <- h^{1/2} exp(-2 dt Y) h^{1/2}.
inline Field flow_update(const FlowState &s, const FlowEval &e, const Field &Y, double dt) {
  Field h(s.geometry.sites());
  for (int k = 0; k < s.geometry.sites(); ++k) {
    Mat m = e.cache.sqrt[k] * herm_apply(Y[k], [dt](double x) { return std::exp(-2.0 * dt * x); }) * e.cache.sqrt[k];
    h[k] = 0.5 * (m + m.adjoint());
    if (min_eigenvalue(h[k]) <= 0)
      throw NumericalError("heat flow: metric lost positive definiteness at site " + std::to_string(k));
  }
  return h;
}

} // namespace detail

/// Explicit exponential-Euler metric flow with backtracking on strict energy decrease.
/// Only s.h changes.  `on_step` (if given) sees every accepted state.
template <class OnStep>
FlowTrace heat_flow_run(FlowState &s, const FlowOptions &o, OnStep &&on_step) {
  require(o.tolerance > 0, "heat_flow_run: tolerance must be > 0");
  require(o.max_steps >= 0, "heat_flow_run: max_steps must be >= 0");
  const double dt0 = o.initial_step.value_or(1e-2 * s.geometry.cell_area());
  require(dt0 > 0, "heat_flow_run: initial step must be > 0");
  FlowTrace tr;
  FlowEval e = evaluate(s);
  double gn = gradient_norm(s, ymh_gradient(s, e));
  double t = 0, dt = dt0;
  tr.steps.push_back({0, e.energy, gn, 0});
  for (long step = 0; step < o.max_steps && gn >= o.tolerance; ++step) {
    const Field Y = detail::flow_generator(s, e, s.group);
    for (;;) {
      FlowState trial = s;
      trial.h = detail::flow_update(s, e, Y, dt);
      FlowEval et = evaluate(trial);
      if (et.energy < e.energy) {
        s.h = std::move(trial.h);
        e = std::move(et);
        break;
      }
      dt *= 0.5;
      if (dt < o.underflow)
        throw NumericalError("heat flow: step size underflow at t = " + std::to_string(t) +
                             ", energy = " + std::to_string(e.energy) + ", gradient norm = " + std::to_string(gn));
    }
    t += dt;
    gn = gradient_norm(s, ymh_gradient(s, e));
    tr.steps.push_back({t, e.energy, gn, dt});
    on_step(s, dt);
    dt = std::min(dt * o.growth, dt0 * o.max_step_factor);
  }
  tr.converged = gn < o.tolerance;
  tr.limit_report = classify_limit(s);
  return tr;
}

inline FlowTrace heat_flow_run(FlowState &s, const FlowOptions &o = {}) {
  return heat_flow_run(s, o, [](const FlowState &, double) {});
}

// ---------------------------------------------------------------------------
// Real-form restriction.

struct RestrictionReport {
  double duration = 0;             // flow time actually covered
  long steps = 0;
  double initial_violation = 0;    // of the starting data
  double constraint_deviation = 0; // max over time of the ambient state's distance from the locus
  double twin_deviation = 0;       // max over time of |h_ambient - h_constrained|
  double constraint_rate() const { return duration > 0 ? constraint_deviation / duration : constraint_deviation; }
  double twin_rate() const { return duration > 0 ? twin_deviation / duration : twin_deviation; }
};

/// Runs the ambient SL(2,C) flow and the constrained flow on the same step sequence.
inline RestrictionReport restriction_check(const GroupDatum &real_form, const FlowState &s, double duration,
                                           bool require_constrained = true, FlowOptions o = {}) {
  const bool ok = (real_form.kind == GroupKind::SLnR && real_form.n == 2) || (real_form.kind == GroupKind::Sp2nR && real_form.n == 1);
  require(ok, "restriction_check: supported real forms are SL(2,R) and Sp(2,R)");
  require(s.rank == 2, "restriction_check: rank-2 state required");
  require(duration > 0, "restriction_check: duration must be > 0");
  RestrictionReport r;
  r.initial_violation = real_form_violation(s);
  if (require_constrained)
    require(r.initial_violation <= 1e-14, "restriction_check: initial state is off the real-form locus");
  FlowState amb = s, con = s;
  amb.group = FlowGroup::sl;
  con.group = real_form.kind == GroupKind::SLnR ? FlowGroup::sl2r : FlowGroup::sp2r;
  o.max_steps = std::max(o.max_steps, 1L);
  auto offdiag_dev = [](const FlowState &x) {
    double d = 0;
    for (const auto &h : x.h) {
      d = std::max({d, std::abs(h(0, 1)), std::abs(h(1, 0))});
      d = std::max(d, std::abs(h.determinant() - cplx(1)));
    }
    return d;
  };
  const double dt0 = o.initial_step.value_or(1e-2 * s.geometry.cell_area());
  FlowEval ea = evaluate(amb);
  double dt = dt0;
  double gn = gradient_norm(amb, ymh_gradient(amb, ea));
  while (r.duration < duration && gn >= o.tolerance && r.steps < o.max_steps) {
    const Field Ya = detail::flow_generator(amb, ea, FlowGroup::sl);
    dt = std::min(dt, duration - r.duration);
    for (;;) {
      FlowState trial = amb;
      trial.h = detail::flow_update(amb, ea, Ya, dt);
      FlowEval et = evaluate(trial);
      if (et.energy < ea.energy) {
        amb.h = std::move(trial.h);
        ea = std::move(et);
        break;
      }
      dt *= 0.5;
      if (dt < o.underflow) throw NumericalError("restriction_check: step size underflow");
    }
    // Constrained twin on the same step.
    const FlowEval ec = evaluate(con);
    con.h = detail::flow_update(con, ec, detail::flow_generator(con, ec, con.group), dt);
    r.duration += dt;
    ++r.steps;
    r.constraint_deviation = std::max(r.constraint_deviation, offdiag_dev(amb));
    double tw = 0;
    for (int k = 0; k < s.geometry.sites(); ++k) tw = std::max(tw, (amb.h[k] - con.h[k]).cwiseAbs().maxCoeff());
    r.twin_deviation = std::max(r.twin_deviation, tw);
    gn = gradient_norm(amb, ymh_gradient(amb, ea));
    dt = std::min(dt * o.growth, dt0 * o.max_step_factor);
  }
  return r;
}

} // namespace higgsmorse
