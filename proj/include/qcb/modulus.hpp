/// \file
/// Conformal modulus of semiannuli and ring domains from structured curved
/// quadrilateral meshes.
///
/// A mesh has (n+1) x (m+1) nodes. Columns i = 0 and i = n are the two sides,
/// rows j = 0 and j = m the two ends. For a quadrilateral S the modulus
/// satisfies mod S = π / E_sides = π E_ends, where E_sides is the Dirichlet
/// energy of the harmonic function equal to 0 and 1 on the sides (natural
/// condition on the ends) and E_ends the same with the roles exchanged.
/// Conforming bilinear elements overestimate both energies, so
/// mod_primal <= mod S <= mod_dual on the polygonal domain and their gap is
/// a reported error bound.
///
/// Ring meshes are periodic in j (row m coincides with row 0); there the
/// factors are 2π and the conjugate problem carries a unit jump across the
/// seam.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qcb/core.hpp"
#include "qcb/gallery.hpp"
#include "qcb/parallel.hpp"

namespace qcb {

struct CurvedQuadMesh {
  enum class Topology { Quadrilateral, Ring };

  std::size_t n = 0;  // cells between the sides
  std::size_t m = 0;  // cells between the ends (ring: period)
  Topology topology = Topology::Quadrilateral;
  std::vector<Complex> nodes;  // row-major in i: index i*(m+1) + j
  std::string provenance;

  CurvedQuadMesh() = default;
  CurvedQuadMesh(std::size_t n_, std::size_t m_, Topology topo = Topology::Quadrilateral)
      : n(n_), m(m_), topology(topo), nodes((n_ + 1) * (m_ + 1)) {}

  bool is_ring() const { return topology == Topology::Ring; }
  Complex& at(std::size_t i, std::size_t j) { return nodes[i * (m + 1) + j]; }
  const Complex& at(std::size_t i, std::size_t j) const { return nodes[i * (m + 1) + j]; }

  std::vector<Complex> side(std::size_t i) const {
    std::vector<Complex> out(m + 1);
    for (std::size_t j = 0; j <= m; ++j) out[j] = at(i, j);
    return out;
  }
  std::vector<Complex> end(std::size_t j) const {
    std::vector<Complex> out(n + 1);
    for (std::size_t i = 0; i <= n; ++i) out[i] = at(i, j);
    return out;
  }
};

struct ModulusEstimate {
  double mod_primal = 0.0;
  double mod_dual = 0.0;
  double value = 0.0;
  double discrepancy = 0.0;
  double lambda_joining = 0.0;
  double lambda_dividing = 0.0;
  int iterations_primal = 0;
  int iterations_dual = 0;
};

struct SolverOptions {
  double rel_residual = 1e-10;
  int max_iterations = 0;  // 0: 400*(n+m) + 20000
  unsigned threads = 1;
};

// ---------------------------------------------------------------------------
// Geometry helpers
// ---------------------------------------------------------------------------

namespace detail {

inline double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

inline double point_segment_distance(Complex p, Complex a, Complex b) {
  const Complex ab = b - a;
  const double L2 = std::norm(ab);
  if (L2 == 0.0) return std::abs(p - a);
  const double s = std::clamp(((p - a) * std::conj(ab)).real() / L2, 0.0, 1.0);
  return std::abs(p - (a + s * ab));
}

inline double polyline_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double best = std::numeric_limits<double>::infinity();
  for (const Complex& p : a)
    for (std::size_t k = 0; k + 1 < b.size(); ++k)
      best = std::min(best, point_segment_distance(p, b[k], b[k + 1]));
  for (const Complex& p : b)
    for (std::size_t k = 0; k + 1 < a.size(); ++k)
      best = std::min(best, point_segment_distance(p, a[k], a[k + 1]));
  return best;
}

/// Winding number of a closed polyline (last point joined to the first).
inline int winding_number(const std::vector<Complex>& poly, Complex z0) {
  double total = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Complex a = poly[k] - z0, b = poly[(k + 1) % poly.size()] - z0;
    total += std::arg(b / a);
  }
  return static_cast<int>(std::lround(total / (2.0 * pi)));
}

}  // namespace detail

/// Throws DegenerateCell for non-finite nodes or cells whose bilinear
/// Jacobian is not positive at every corner (which implies positivity on the
/// whole cell).
inline void validate_mesh(const CurvedQuadMesh& mesh) {
  if (mesh.n < 1 || mesh.m < 1 || mesh.nodes.size() != (mesh.n + 1) * (mesh.m + 1))
    throw DegenerateCell("mesh dimensions inconsistent");
  for (std::size_t k = 0; k < mesh.nodes.size(); ++k) {
    const Complex z = mesh.nodes[k];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw UnboundedImage("non-finite node " + std::to_string(k));
  }
  for (std::size_t i = 0; i < mesh.n; ++i)
    for (std::size_t j = 0; j < mesh.m; ++j) {
      const std::array<Complex, 4> p{mesh.at(i, j), mesh.at(i + 1, j), mesh.at(i + 1, j + 1),
                                     mesh.at(i, j + 1)};
      for (int a = 0; a < 4; ++a) {
        const Complex next = p[(a + 1) % 4] - p[a], prev = p[(a + 3) % 4] - p[a];
        if (!(detail::cross(next, prev) > 0.0))
          throw DegenerateCell("cell (" + std::to_string(i) + ", " + std::to_string(j) +
                               ") folds or has zero area");
      }
    }
}

// ---------------------------------------------------------------------------
// Bilinear FEM on the structured mesh
// ---------------------------------------------------------------------------

namespace detail {

using LocalMatrix = std::array<double, 16>;

/// Stiffness of the bilinear isoparametric quad with 2x2 Gauss points.
/// Local nodes: (i,j), (i+1,j), (i+1,j+1), (i,j+1).
inline LocalMatrix bilinear_stiffness(const std::array<Complex, 4>& p) {
  static constexpr double xi_a[4] = {-1.0, 1.0, 1.0, -1.0};
  static constexpr double eta_a[4] = {-1.0, -1.0, 1.0, 1.0};
  const double g = 1.0 / std::sqrt(3.0);
  LocalMatrix K{};
  for (double xi : {-g, g})
    for (double eta : {-g, g}) {
      double dxi[4], deta[4];
      for (int a = 0; a < 4; ++a) {
        dxi[a] = 0.25 * xi_a[a] * (1.0 + eta_a[a] * eta);
        deta[a] = 0.25 * eta_a[a] * (1.0 + xi_a[a] * xi);
      }
      double j11 = 0, j12 = 0, j21 = 0, j22 = 0;
      for (int a = 0; a < 4; ++a) {
        j11 += p[a].real() * dxi[a];
        j12 += p[a].imag() * dxi[a];
        j21 += p[a].real() * deta[a];
        j22 += p[a].imag() * deta[a];
      }
      const double det = j11 * j22 - j12 * j21;
      double gx[4], gy[4];
      for (int a = 0; a < 4; ++a) {
        gx[a] = (j22 * dxi[a] - j12 * deta[a]) / det;
        gy[a] = (-j21 * dxi[a] + j11 * deta[a]) / det;
      }
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) K[a * 4 + b] += (gx[a] * gx[b] + gy[a] * gy[b]) * det;
    }
  return K;
}

/// Node value = x[dof] + offset, dof < 0 for fixed nodes.
struct NodeRef {
  long dof;
  double offset;
};

struct DirichletProblem {
  std::size_t n, m;
  bool ring;
  std::vector<LocalMatrix> K;          // per cell
  std::vector<std::array<NodeRef, 4>> refs;  // per cell
  std::size_t dofs = 0;
};

inline double energy(const DirichletProblem& P, const std::vector<double>& x) {
  std::vector<double> per_row(P.n, 0.0);
  for (std::size_t i = 0; i < P.n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < P.m; ++j) {
      const std::size_t c = i * P.m + j;
      double u[4];
      for (int a = 0; a < 4; ++a) {
        const NodeRef& r = P.refs[c][a];
        u[a] = (r.dof >= 0 ? x[static_cast<std::size_t>(r.dof)] : 0.0) + r.offset;
      }
      double e = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) e += u[a] * P.K[c][a * 4 + b] * u[b];
      row += e;
    }
    per_row[i] = row;
  }
  return pairwise_sum(per_row);
}

inline void apply(const DirichletProblem& P, const std::vector<double>& x, std::vector<double>& y) {
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t c = 0; c < P.K.size(); ++c) {
    const auto& r = P.refs[c];
    double u[4];
    for (int a = 0; a < 4; ++a) u[a] = r[a].dof >= 0 ? x[static_cast<std::size_t>(r[a].dof)] : 0.0;
    for (int a = 0; a < 4; ++a) {
      if (r[a].dof < 0) continue;
      double s = 0.0;
      for (int b = 0; b < 4; ++b) s += P.K[c][a * 4 + b] * u[b];
      y[static_cast<std::size_t>(r[a].dof)] += s;
    }
  }
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> t(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) t[k] = a[k] * b[k];
  return pairwise_sum(t);
}

/// Jacobi-preconditioned CG; returns the iteration count.
inline int solve_cg(const DirichletProblem& P, std::vector<double>& x, const SolverOptions& opt) {
  const std::size_t N = P.dofs;
  std::vector<double> b(N, 0.0), diag(N, 0.0);
  for (std::size_t c = 0; c < P.K.size(); ++c) {
    const auto& r = P.refs[c];
    for (int a = 0; a < 4; ++a) {
      if (r[a].dof < 0) continue;
      const auto da = static_cast<std::size_t>(r[a].dof);
      diag[da] += P.K[c][a * 4 + a];
      double s = 0.0;
      for (int q = 0; q < 4; ++q) s += P.K[c][a * 4 + q] * r[q].offset;
      b[da] -= s;
    }
  }
  for (double d : diag)
    if (!(d > 0.0)) throw SolveFailure("non-positive diagonal; degenerate mesh");
  std::vector<double> Ax(N), r(N), z(N), p(N), Ap(N);
  apply(P, x, Ax);
  for (std::size_t k = 0; k < N; ++k) r[k] = b[k] - Ax[k];
  const double bnorm = std::sqrt(dot(b, b));
  const double target = opt.rel_residual * (bnorm > 0.0 ? bnorm : 1.0);
  const int max_it = opt.max_iterations > 0 ? opt.max_iterations
                                            : static_cast<int>(400 * (P.n + P.m) + 20000);
  for (std::size_t k = 0; k < N; ++k) z[k] = r[k] / diag[k];
  p = z;
  double rz = dot(r, z);
  for (int it = 0; it < max_it; ++it) {
    if (std::sqrt(dot(r, r)) <= target) return it;
    apply(P, p, Ap);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) throw SolveFailure("matrix not positive definite");
    const double alpha = rz / pAp;
    for (std::size_t k = 0; k < N; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * Ap[k];
    }
    for (std::size_t k = 0; k < N; ++k) z[k] = r[k] / diag[k];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < N; ++k) p[k] = z[k] + beta * p[k];
  }
  if (std::sqrt(dot(r, r)) <= target) return max_it;
  throw SolveFailure("conjugate gradients did not reach the residual target");
}

enum class Boundary { Sides, Ends };

inline double solve_energy(std::size_t n, std::size_t m, bool ring, const std::vector<LocalMatrix>& K,
                           Boundary which, const SolverOptions& opt, int& iterations) {
  const std::size_t cols = ring ? m : m + 1;  // distinct j indices
  std::vector<long> dof(( n + 1) * cols, -1);
  std::vector<double> fixed((n + 1) * cols, 0.0);
  std::vector<double> guess;
  std::size_t count = 0;
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const std::size_t k = i * cols + j;
      bool is_fixed = false;
      double val = 0.0;
      if (which == Boundary::Sides) {
        if (i == 0 || i == n) { is_fixed = true; val = i == 0 ? 0.0 : 1.0; }
      } else if (!ring) {
        if (j == 0 || j == m) { is_fixed = true; val = j == 0 ? 0.0 : 1.0; }
      } else if (i == 0 && j == 0) {
        is_fixed = true;  // removes the additive constant
      }
      if (is_fixed) {
        fixed[k] = val;
      } else {
        dof[k] = static_cast<long>(count++);
        guess.push_back(which == Boundary::Sides ? static_cast<double>(i) / static_cast<double>(n)
                                                 : static_cast<double>(j) / static_cast<double>(m));
      }
    }
  DirichletProblem P{n, m, ring, K, {}, count};
  P.refs.resize(n * m);
  auto ref = [&](std::size_t i, std::size_t j) {
    double jump = 0.0;
    if (ring && j == m) {
      j = 0;
      jump = which == Boundary::Ends ? 1.0 : 0.0;
    }
    const std::size_t k = i * cols + j;
    return NodeRef{dof[k], (dof[k] >= 0 ? 0.0 : fixed[k]) + jump};
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      P.refs[i * m + j] = {ref(i, j), ref(i + 1, j), ref(i + 1, j + 1), ref(i, j + 1)};
  iterations = solve_cg(P, guess, opt);
  return energy(P, guess);
}

inline ModulusEstimate estimate_from_stiffness(std::size_t n, std::size_t m, bool ring,
                                               const std::vector<LocalMatrix>& K,
                                               const SolverOptions& opt) {
  ModulusEstimate est;
  const double e_sides = solve_energy(n, m, ring, K, Boundary::Sides, opt, est.iterations_primal);
  const double e_ends = solve_energy(n, m, ring, K, Boundary::Ends, opt, est.iterations_dual);
  if (!(e_sides > 0.0) || !(e_ends > 0.0)) throw SolveFailure("zero Dirichlet energy");
  const double span = ring ? 2.0 * pi : pi;
  est.mod_primal = span / e_sides;
  est.mod_dual = span * e_ends;
  est.value = 0.5 * (est.mod_primal + est.mod_dual);
  est.discrepancy = std::abs(est.mod_primal - est.mod_dual);
  est.lambda_joining = est.value / pi;
  est.lambda_dividing = pi / est.value;
  return est;
}

}  // namespace detail

/// Two conjugate Dirichlet solves on the mesh.
inline ModulusEstimate discrete_modulus(const CurvedQuadMesh& mesh, const SolverOptions& opt = {}) {
  validate_mesh(mesh);
  std::vector<detail::LocalMatrix> K(mesh.n * mesh.m);
  parallel_for(mesh.n, opt.threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < mesh.m; ++j)
      K[i * mesh.m + j] = detail::bilinear_stiffness(
          {mesh.at(i, j), mesh.at(i + 1, j), mesh.at(i + 1, j + 1), mesh.at(i, j + 1)});
  });
  return detail::estimate_from_stiffness(mesh.n, mesh.m, mesh.is_ring(), K, opt);
}

// ---------------------------------------------------------------------------
// Canonical moduli and mesh generation
// ---------------------------------------------------------------------------

/// log(R/r) for A(t;r,R)∩H, log(r2/r1) for T(ζ;r1,r2).
inline double canonical_modulus(const SemiannulusSpec& spec) {
  spec.validate();
  if (spec.sector) throw UnsupportedSpec("sector-restricted region has no canonical modulus");
  return spec.log_ratio();
}

struct MeshOptions {
  /// Angular margin removed at both ends, in the half-plane angle θ.
  double end_margin = 0.0;
  /// Log-graded angular spacing toward both ends (requires end_margin > 0).
  bool graded = false;
};

namespace detail {

inline std::vector<double> angle_nodes(double th0, double th1, std::size_t m, const MeshOptions& o) {
  std::vector<double> th(m + 1);
  const double lo = th0 + o.end_margin, hi = th1 - o.end_margin;
  if (!(lo < hi)) throw InvalidSpec("end margin swallows the angular range");
  if (!o.graded) {
    for (std::size_t j = 0; j <= m; ++j)
      th[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(m);
    return th;
  }
  if (!(o.end_margin > 0.0)) throw InvalidSpec("graded ends need end_margin > 0");
  const double mid = 0.5 * (th0 + th1), half = 0.5 * (th1 - th0);
  const double g = o.end_margin / half;
  for (std::size_t j = 0; j <= m; ++j) {
    const double u = 2.0 * static_cast<double>(j) / static_cast<double>(m) - 1.0;  // [-1, 1]
    const double d = half * std::pow(g, std::abs(u));  // distance to the nearer end
    th[j] = u < 0.0 ? th0 + d : (u > 0.0 ? th1 - d : mid);
  }
  return th;
}

}  // namespace detail

/// Images under `map` of the log-polar product grid on the spec. Columns are
/// the sides (|z-t| = r, R resp. |w| = r1, r2), rows the ends.
inline CurvedQuadMesh mesh_region(const NamedMap& map, const SemiannulusSpec& spec, std::size_t n,
                                  std::size_t m, const MeshOptions& opt = {}) {
  spec.validate();
  if (n < 8 || m < 8) throw BadParams("mesh_region needs n, m >= 8");
  const Domain want = spec.is_disk() ? Domain::UnitDisk : Domain::UpperHalfPlane;
  if (map.domain != want) throw DomainMismatch("map and spec live on different domains");
  const auto th = detail::angle_nodes(spec.theta_lo(), spec.theta_hi(), m, opt);
  CurvedQuadMesh mesh(n, m);
  const double s0 = std::log(spec.r), s1 = std::log(spec.R);
  for (std::size_t i = 0; i <= n; ++i) {
    const double rho = std::exp(s0 + (s1 - s0) * static_cast<double>(i) / static_cast<double>(n));
    for (std::size_t j = 0; j <= m; ++j) {
      const Complex e = std::polar(rho, th[j]);
      Complex z = spec.is_disk() ? halfplane_to_disk(e, spec.zeta) : Complex(spec.t, 0.0) + e;
      // snap ends lying on the boundary exactly onto it
      const bool on_edge = opt.end_margin == 0.0 && !spec.sector && (j == 0 || j == m);
      if (on_edge) z = spec.is_disk() ? z / std::abs(z) : Complex(z.real(), 0.0);
      mesh.at(i, j) = map(z);
    }
  }
  std::ostringstream prov;
  prov << map.name << " on " << (spec.is_disk() ? "T" : "A") << "(";
  if (spec.is_disk()) prov << spec.zeta.real() << (spec.zeta.imag() < 0 ? "" : "+") << spec.zeta.imag() << "i";
  else prov << spec.t;
  prov << ";" << spec.r << "," << spec.R << ") theta=[" << spec.theta_lo() << "," << spec.theta_hi()
       << "] margin=" << opt.end_margin;
  mesh.provenance = prov.str();
  validate_mesh(mesh);
  return mesh;
}

struct PullbackOptions {
  /// Distance of the first interior angle node from each end.
  double end_floor = 1e-10;
  /// Log-graded angles toward the ends; uniform otherwise.
  bool graded = true;
  SolverOptions solver{};
};

namespace detail {

inline std::vector<double> closed_angle_nodes(double th0, double th1, std::size_t m, const PullbackOptions& o) {
  std::vector<double> th(m + 1);
  const double half = 0.5 * (th1 - th0);
  for (std::size_t j = 0; j <= m; ++j) {
    const double u = 2.0 * static_cast<double>(j) / static_cast<double>(m) - 1.0;
    if (!o.graded) {
      th[j] = th0 + half * (u + 1.0);
      continue;
    }
    if (j == 0 || j == m) {
      th[j] = j == 0 ? th0 : th1;
      continue;
    }
    const double v = std::abs(u) / (1.0 - 2.0 / static_cast<double>(m));
    const double d = half * std::pow(std::min(o.end_floor / half, 1.0), v);
    th[j] = u < 0.0 ? th0 + d : (u > 0.0 ? th1 - d : th0 + half);
  }
  return th;
}

}  // namespace detail

/// mod f(S) for any μ-conformal f, computed from μ alone: the two conjugate
/// Dirichlet problems on the log-polar grid σ = s + iθ of S with the energy
/// of the image pulled back through f,
///   |∇v|² dA = |u_s - i u_θ - conj(ν)(u_s + i u_θ)|² / (1 - |ν|²) ds dθ,
/// ν the coefficient of f in σ. Exact geometry, so spiralling images are no
/// harder than round ones. Element matrices are assembled as sums of
/// Hermitian squares, which keeps them semidefinite when |ν| -> 1.
inline ModulusEstimate beltrami_modulus(const BeltramiField& mu, const SemiannulusSpec& spec,
                                        std::size_t n, std::size_t m,
                                        const PullbackOptions& opt = {}) {
  spec.validate();
  if (n < 8 || m < 8) throw BadParams("beltrami_modulus needs n, m >= 8");
  const Domain want = spec.is_disk() ? Domain::UnitDisk : Domain::UpperHalfPlane;
  if (mu.domain() != want) throw DomainMismatch("field and spec live on different domains");
  const auto th = detail::closed_angle_nodes(spec.theta_lo(), spec.theta_hi(), m, opt);
  const double s0 = std::log(spec.r), s1 = std::log(spec.R);
  static constexpr double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  std::vector<detail::LocalMatrix> K(n * m);
  parallel_for(n, opt.solver.threads, [&](std::size_t i) {
    const double sa = s0 + (s1 - s0) * static_cast<double>(i) / static_cast<double>(n);
    const double sb = s0 + (s1 - s0) * static_cast<double>(i + 1) / static_cast<double>(n);
    const double hs = sb - sa;
    for (std::size_t j = 0; j < m; ++j) {
      const double ht = th[j + 1] - th[j];
      detail::LocalMatrix Ke{};
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) {
          const double xi = 0.5 * (1.0 + gx[p]), eta = 0.5 * (1.0 + gx[q]);  // [0,1]
          const Complex e = std::exp(Complex(sa + hs * xi, th[j] + ht * eta));
          Complex nu;
          if (spec.is_disk()) {
            const Complex z = halfplane_to_disk(e, spec.zeta);
            const Complex dz = 2.0 * spec.zeta / (z * z - spec.zeta * spec.zeta);  // (log L)'
            nu = mu(z) * dz / std::conj(dz);
          } else {
            nu = mu(Complex(spec.t, 0.0) + e) * std::conj(e) / e;
          }
          const double w = gw[p] * gw[q] * 0.25 * hs * ht / (1.0 - std::norm(nu));
          // local nodes (i,j), (i+1,j), (i+1,j+1), (i,j+1)
          const double ds[4] = {-(1 - eta) / hs, (1 - eta) / hs, eta / hs, -eta / hs};
          const double dt[4] = {-(1 - xi) / ht, -xi / ht, xi / ht, (1 - xi) / ht};
          Complex c[4];
          for (int a = 0; a < 4; ++a)
            c[a] = Complex(ds[a], -dt[a]) - std::conj(nu) * Complex(ds[a], dt[a]);
          for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) Ke[a * 4 + b] += w * (c[a] * std::conj(c[b])).real();
        }
      K[i * m + j] = Ke;
    }
  });
  return detail::estimate_from_stiffness(n, m, false, K, opt.solver);
}

/// Axis-aligned a x b rectangle with the vertical edges as sides; mod = π a / b.
inline CurvedQuadMesh rectangle_mesh(double a, double b, std::size_t n, std::size_t m) {
  if (!(a > 0.0 && b > 0.0)) throw BadParams("rectangle needs positive sides");
  CurvedQuadMesh mesh(n, m);
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 0; j <= m; ++j)
      mesh.at(i, j) = Complex(a * static_cast<double>(i) / static_cast<double>(n),
                              b * static_cast<double>(j) / static_cast<double>(m));
  mesh.provenance = "rectangle";
  return mesh;
}

/// Ring between two star-shaped curves about `center`, radii interpolated
/// geometrically. Row m repeats row 0.
inline CurvedQuadMesh star_ring_mesh(Complex center, const std::function<double(double)>& rho_in,
                                     const std::function<double(double)>& rho_out, std::size_t n,
                                     std::size_t m) {
  CurvedQuadMesh mesh(n, m, CurvedQuadMesh::Topology::Ring);
  for (std::size_t j = 0; j <= m; ++j) {
    const double th = 2.0 * pi * static_cast<double>(j % m) / static_cast<double>(m);
    const double a = std::log(rho_in(th)), b = std::log(rho_out(th));
    if (!(b > a)) throw InvalidSpec("outer radius must exceed inner radius");
    for (std::size_t i = 0; i <= n; ++i) {
      const double s = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
      mesh.at(i, j) = center + std::polar(std::exp(s), th);
    }
  }
  mesh.provenance = "star ring";
  validate_mesh(mesh);
  return mesh;
}

/// Minimal Euclidean distance between the two sides.
inline double side_distance(const CurvedQuadMesh& mesh) {
  return detail::polyline_distance(mesh.side(0), mesh.side(mesh.n));
}

/// Ŝ = S ∪ {1/z̄ : z ∈ S} for a semiannulus mesh in D whose ends lie on ∂D.
/// The ring is normalised by ψ(z) = 1/(z - p) with p the midpoint of the
/// boundary arc cut off by the outer side, so that no node lands at ∞.
inline CurvedQuadMesh reflected_ring_mesh(const CurvedQuadMesh& S) {
  if (S.is_ring()) throw InvalidSpec("already a ring");
  validate_mesh(S);
  if (side_distance(S) <= 1e-14) throw DegenerateCell("sides touch: the semiannulus has modulus 0");
  const std::size_t n = S.n, m = S.m;
  for (std::size_t j : {std::size_t{0}, m})
    for (std::size_t i = 0; i <= n; ++i)
      if (std::abs(std::abs(S.at(i, j)) - 1.0) > 1e-9)
        throw InvalidSpec("ends must lie on the unit circle");
  // arc of ∂D between the outer side's endpoints that avoids the inner side
  const double a0 = std::arg(S.at(n, 0)), a1 = std::arg(S.at(n, m));
  const double inner = std::arg(S.at(0, 0));
  auto on_ccw_arc = [](double from, double to, double x) {
    const double span = std::remainder(to - from, 2.0 * pi) < 0 ? std::remainder(to - from, 2.0 * pi) + 2.0 * pi
                                                                : std::remainder(to - from, 2.0 * pi);
    double off = std::remainder(x - from, 2.0 * pi);
    if (off < 0) off += 2.0 * pi;
    return off < span;
  };
  double span = std::remainder(a1 - a0, 2.0 * pi);
  if (span < 0) span += 2.0 * pi;
  double mid = a0 + 0.5 * span;
  if (on_ccw_arc(a0, a1, inner)) mid += pi;  // take the complementary arc
  const Complex p = std::polar(1.0, mid);
  CurvedQuadMesh ring(n, 2 * m, CurvedQuadMesh::Topology::Ring);
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      Complex z = S.at(i, j);
      if (j == 0 || j == m) z /= std::abs(z);
      ring.at(i, j) = 1.0 / (z - p);
    }
    for (std::size_t j = 1; j <= m; ++j) {
      const Complex z = S.at(i, m - j);
      // ψ(1/z̄) = z̄ / (1 - p z̄)
      ring.at(i, m + j) = std::conj(z) / (1.0 - p * std::conj(z));
    }
    ring.at(i, 2 * m) = ring.at(i, 0);
  }
  // a reflection reverses orientation; flip i if the glued ring is negative
  ring.provenance = "reflection of " + S.provenance;
  try {
    validate_mesh(ring);
  } catch (const DegenerateCell&) {
    CurvedQuadMesh flipped = ring;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; j <= 2 * m; ++j) flipped.at(i, j) = ring.at(n - i, j);
    validate_mesh(flipped);
    return flipped;
  }
  return ring;
}

/// Ring obtained by reflecting a half-plane semiannulus mesh across R.
inline CurvedQuadMesh doubled_halfplane_ring(const CurvedQuadMesh& S) {
  if (S.is_ring()) throw InvalidSpec("already a ring");
  const std::size_t n = S.n, m = S.m;
  CurvedQuadMesh ring(n, 2 * m, CurvedQuadMesh::Topology::Ring);
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      Complex z = S.at(i, j);
      if (j == 0 || j == m) z = Complex(z.real(), 0.0);
      ring.at(i, j) = z;
    }
    for (std::size_t j = 1; j < m; ++j) ring.at(i, m + j) = std::conj(S.at(i, m - j));
    ring.at(i, 2 * m) = ring.at(i, 0);
  }
  ring.provenance = "doubled " + S.provenance;
  validate_mesh(ring);
  return ring;
}

inline ModulusEstimate reflected_ring_modulus(const CurvedQuadMesh& S, const SolverOptions& opt = {}) {
  return discrete_modulus(reflected_ring_mesh(S), opt);
}

inline ModulusEstimate reflected_ring_modulus(const SemiannulusSpec& spec, std::size_t n,
                                              std::size_t m, const SolverOptions& opt = {}) {
  if (!spec.is_disk()) throw DomainMismatch("reflection across the unit circle needs a disk spec");
  return reflected_ring_modulus(mesh_region(identity_map(Domain::UnitDisk), spec, n, m), opt);
}

struct RoundSubannulus {
  double r = 0.0;
  double R = 0.0;
  double log_ratio() const { return std::log(R / r); }
};

/// Largest A(z0; r, R) inside a ring mesh: r is the largest distance from z0
/// to the inner boundary, R the smallest distance to the outer boundary.
inline RoundSubannulus max_round_subannulus(const CurvedQuadMesh& B, Complex z0) {
  if (!B.is_ring()) throw InvalidSpec("max_round_subannulus needs a ring mesh");
  std::vector<Complex> in = B.side(0), out = B.side(B.n);
  in.pop_back();
  out.pop_back();
  if (detail::winding_number(in, z0) == 0 || detail::winding_number(out, z0) == 0)
    throw NotSeparating("ring does not separate z0 from infinity");
  auto max_r = [&](const std::vector<Complex>& c) {
    double r = 0.0;
    for (Complex z : c) r = std::max(r, std::abs(z - z0));
    return r;
  };
  auto min_r = [&](const std::vector<Complex>& c) {
    double r = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < c.size(); ++k)
      r = std::min(r, detail::point_segment_distance(z0, c[k], c[(k + 1) % c.size()]));
    return r;
  };
  if (max_r(in) > max_r(out)) std::swap(in, out);
  return {max_r(in), min_r(out)};
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

/// qcb-mesh v1: header lines, then one node per line "i j x y".
inline void write_mesh(std::ostream& os, const CurvedQuadMesh& mesh) {
  os << "# qcb-mesh v1\n";
  os << "n " << mesh.n << " m " << mesh.m << " topology "
     << (mesh.is_ring() ? "ring" : "quadrilateral") << "\n";
  os << "sides i=0 i=" << mesh.n << "\n";
  os << "ends j=0 j=" << mesh.m << "\n";
  os << "provenance " << mesh.provenance << "\n";
  char buf[96];
  for (std::size_t i = 0; i <= mesh.n; ++i)
    for (std::size_t j = 0; j <= mesh.m; ++j) {
      std::snprintf(buf, sizeof buf, "%zu %zu %.17g %.17g\n", i, j, mesh.at(i, j).real(),
                    mesh.at(i, j).imag());
      os << buf;
    }
}

inline CurvedQuadMesh read_mesh(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "# qcb-mesh v1") throw FormatError("missing mesh magic line");
  std::string kw_n, kw_m, kw_t, topo;
  std::size_t n = 0, m = 0;
  if (!std::getline(is, line)) throw FormatError("missing dimension line");
  {
    std::istringstream ls(line);
    if (!(ls >> kw_n >> n >> kw_m >> m >> kw_t >> topo) || kw_n != "n" || kw_m != "m" ||
        kw_t != "topology")
      throw FormatError("bad dimension line");
  }
  if (topo != "ring" && topo != "quadrilateral") throw FormatError("unknown topology " + topo);
  if (n < 1 || m < 1) throw FormatError("empty mesh");
  CurvedQuadMesh mesh(n, m, topo == "ring" ? CurvedQuadMesh::Topology::Ring
                                           : CurvedQuadMesh::Topology::Quadrilateral);
  for (const char* key : {"sides", "ends", "provenance"}) {
    if (!std::getline(is, line) || line.rfind(key, 0) != 0)
      throw FormatError(std::string("missing ") + key + " line");
    if (std::string(key) == "provenance")
      mesh.provenance = line.size() > 11 ? line.substr(11) : "";
  }
  std::vector<char> seen(mesh.nodes.size(), 0);
  std::size_t i = 0, j = 0;
  double x = 0, y = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (!(ls >> i >> j >> x >> y) || i > n || j > m) throw FormatError("bad node line: " + line);
    mesh.at(i, j) = Complex(x, y);
    seen[i * (m + 1) + j] = 1;
  }
  for (char s : seen)
    if (!s) throw FormatError("missing node");
  return mesh;
}

}  // namespace qcb
