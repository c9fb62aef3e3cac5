/// \file
/// Singular annulus integrals in log-polar coordinates.
///
/// A semiannulus A(t; r, R) ∩ H is parametrised by z = t + e^{s + iθ} with
/// s in [log r, log R] and θ in the (sector-restricted) range (0, π). Since
/// dx dy / |z - t|^2 = ds dθ, every kernel carrying the 1/|z - t|^2 weight
/// becomes a bounded function of (s, θ) whenever μ is bounded away from 1.
/// Disk semiannuli T(ζ; r1, r2) use the same grid in the half-plane picture,
/// mapped into D by z = ζ (i - w)/(i + w); the disk kernels are evaluated
/// literally at z together with the Jacobian |M'(w)|^2 |w|^2.
///
/// Integration is a tensor composite midpoint rule refined dyadically in
/// both directions until two successive levels agree.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qcb/core.hpp"
#include "qcb/parallel.hpp"

namespace qcb {

enum class KernelKind {
  DPlusMinusOne,
  DMinusMinusOne,
  SquaredModulus,
  RealQuadratic,
  BrakalovaJenkins,
  InfinityKernel,
  DiskSquared,
  DiskReal,
};

inline constexpr KernelKind all_kernels[] = {
    KernelKind::DPlusMinusOne,    KernelKind::DMinusMinusOne,
    KernelKind::SquaredModulus,   KernelKind::RealQuadratic,
    KernelKind::BrakalovaJenkins, KernelKind::InfinityKernel,
    KernelKind::DiskSquared,      KernelKind::DiskReal,
};

inline const char* to_string(KernelKind k) {
  switch (k) {
    case KernelKind::DPlusMinusOne: return "DPlusMinusOne";
    case KernelKind::DMinusMinusOne: return "DMinusMinusOne";
    case KernelKind::SquaredModulus: return "SquaredModulus";
    case KernelKind::RealQuadratic: return "RealQuadratic";
    case KernelKind::BrakalovaJenkins: return "BrakalovaJenkins";
    case KernelKind::InfinityKernel: return "InfinityKernel";
    case KernelKind::DiskSquared: return "DiskSquared";
    case KernelKind::DiskReal: return "DiskReal";
  }
  return "?";
}

inline KernelKind kernel_from_string(std::string_view name) {
  for (KernelKind k : all_kernels)
    if (name == to_string(k)) return k;
  throw UnknownName("kernel '" + std::string(name) + "'");
}

inline bool is_disk_kernel(KernelKind k) {
  return k == KernelKind::DiskSquared || k == KernelKind::DiskReal;
}

struct QuadOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  int base_theta = 16;  // θ cells at the coarsest level
  std::size_t max_cells = std::size_t{1} << 20;
  unsigned threads = 1;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;  // |I_finest - I_previous|
  std::size_t cells = 0;
  double clipped_fraction = 0.0;
  bool converged = false;  // false means ToleranceNotReached; value is the best level
};

struct CellValue {
  double value;
  bool clipped;
};

/// Midpoint rule on [a0,a1]x[b0,b1] with dyadic refinement. The cell
/// aspect ratio is kept near one at every level.
template <typename Integrand>
QuadratureResult integrate_rectangle(double a0, double a1, double b0, double b1,
                                     const Integrand& f, const QuadOptions& opt) {
  const double la = a1 - a0, lb = b1 - b0;
  std::size_t nb = static_cast<std::size_t>(std::max(2, opt.base_theta));
  std::size_t na = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::ceil(static_cast<double>(nb) * la / lb)));

  auto level = [&](std::size_t n_a, std::size_t n_b, std::size_t& clipped) {
    const double ha = la / static_cast<double>(n_a);
    const double hb = lb / static_cast<double>(n_b);
    std::vector<double> rows(n_a, 0.0);
    std::vector<std::size_t> row_clipped(n_a, 0);
    parallel_for(n_a, opt.threads, [&](std::size_t i) {
      const double a = a0 + (static_cast<double>(i) + 0.5) * ha;
      std::vector<double> col(n_b);
      std::size_t c = 0;
      for (std::size_t j = 0; j < n_b; ++j) {
        const double b = b0 + (static_cast<double>(j) + 0.5) * hb;
        const CellValue v = f(a, b);
        col[j] = v.value;
        c += v.clipped ? 1 : 0;
      }
      rows[i] = pairwise_sum(col);
      row_clipped[i] = c;
    });
    clipped = 0;
    for (std::size_t c : row_clipped) clipped += c;
    return pairwise_sum(rows) * ha * hb;
  };

  QuadratureResult out;
  std::size_t clipped = 0;
  double prev = level(na, nb, clipped);
  out.value = prev;
  out.cells = na * nb;
  out.clipped_fraction = static_cast<double>(clipped) / static_cast<double>(out.cells);
  out.abs_error_estimate = std::abs(prev);
  while (4 * na * nb <= opt.max_cells) {
    na *= 2;
    nb *= 2;
    const double cur = level(na, nb, clipped);
    out.value = cur;
    out.cells = na * nb;
    out.clipped_fraction = static_cast<double>(clipped) / static_cast<double>(out.cells);
    out.abs_error_estimate = std::abs(cur - prev);
    if (!std::isfinite(cur)) break;
    if (out.abs_error_estimate <= std::max(opt.abs_tol, opt.rel_tol * std::abs(cur))) {
      out.converged = true;
      return out;
    }
    prev = cur;
  }
  return out;
}

namespace detail {

inline double rem_mu(Complex mu) { return 1.0 - std::norm(mu); }

/// Half-plane kernel after multiplication by |z - t|^2; `rot` is e^{-2iθ}.
inline double halfplane_flat_kernel(KernelKind k, Complex mu, Complex rot) {
  const double den = rem_mu(mu);
  const double m2 = std::norm(mu);
  const double re_rot = (rot * mu).real();
  switch (k) {
    case KernelKind::DPlusMinusOne: return std::norm(1.0 - rot * mu) / den - 1.0;
    case KernelKind::DMinusMinusOne: return std::norm(1.0 + rot * mu) / den - 1.0;
    case KernelKind::SquaredModulus: return m2 / den;
    case KernelKind::RealQuadratic: return re_rot / den;
    case KernelKind::BrakalovaJenkins: return (m2 + std::abs(re_rot)) / den;
    case KernelKind::InfinityKernel: return (m2 - re_rot) / den;
    default: break;
  }
  throw DomainMismatch(std::string("kernel ") + to_string(k) + " needs a disk spec");
}

inline double disk_kernel(KernelKind k, Complex mu, Complex z, Complex zeta) {
  const double den = rem_mu(mu);
  const Complex q = z * z - zeta * zeta;
  if (k == KernelKind::DiskSquared) return std::norm(mu) / (den * std::norm(q));
  if (k == KernelKind::DiskReal) return (zeta * zeta * mu / (q * q)).real() / den;
  throw DomainMismatch(std::string("kernel ") + to_string(k) + " needs a half-plane spec");
}

}  // namespace detail

/// Pointwise value of a half-plane kernel (including its 1/|z-t|^2 weight).
inline double kernel_value(KernelKind k, Complex mu, Complex z, double t) {
  const Complex w = z - t;
  return detail::halfplane_flat_kernel(k, mu, std::conj(w) / w) / std::norm(w);
}

inline QuadratureResult annulus_integral(const BeltramiField& mu,
                                         const SemiannulusSpec& spec,
                                         KernelKind kernel,
                                         const QuadOptions& opt = {}) {
  spec.validate();
  const double s0 = std::log(spec.r), s1 = std::log(spec.R);
  const double th0 = spec.theta_lo(), th1 = spec.theta_hi();
  if (!spec.is_disk()) {
    if (mu.domain() != Domain::UpperHalfPlane)
      throw DomainMismatch("half-plane spec needs a half-plane field");
    if (is_disk_kernel(kernel))
      throw DomainMismatch("disk kernel on a half-plane spec");
    const double t = spec.t;
    return integrate_rectangle(
        s0, s1, th0, th1,
        [&](double s, double th) {
          const Complex e = std::polar(std::exp(s), th);
          const MuSample m = mu.evaluate(Complex(t, 0.0) + e);
          const Complex rot = std::polar(1.0, -2.0 * th);
          return CellValue{detail::halfplane_flat_kernel(kernel, m.value, rot), m.clipped};
        },
        opt);
  }
  if (mu.domain() != Domain::UnitDisk)
    throw DomainMismatch("disk spec needs a disk field");
  if (!is_disk_kernel(kernel))
    throw DomainMismatch("half-plane kernel on a disk spec");
  const Complex zeta = spec.zeta;
  return integrate_rectangle(
      s0, s1, th0, th1,
      [&](double s, double th) {
        const Complex w = std::polar(std::exp(s), th);
        const Complex z = halfplane_to_disk(w, zeta);
        const MuSample m = mu.evaluate(z);
        const double jac = std::norm(halfplane_to_disk_derivative(w, zeta)) * std::norm(w);
        return CellValue{detail::disk_kernel(kernel, m.value, z, zeta) * jac, m.clipped};
      },
      opt);
}

/// Q_mu(t; r, R) = 1 + (1/(π log(R/r))) ∬ (D_{mu,t} - 1)/|z-t|^2.
inline QuadratureResult q_modulus_ratio(const BeltramiField& mu, double t, double r,
                                        double R, const QuadOptions& opt = {}) {
  const auto spec = SemiannulusSpec::half_plane(t, r, R);
  QuadratureResult q = annulus_integral(mu, spec, KernelKind::DPlusMinusOne, opt);
  const double scale = pi * spec.log_ratio();
  q.value = 1.0 + q.value / scale;
  q.abs_error_estimate /= scale;
  return q;
}

/// ω(t; r) = (2/(π r^2)) ∬_{A(t;0,r)∩H} (D_{mu,t} - 1) dx dy.
///
/// With z = t + r √v e^{iθ} the area element is (r^2/2) dv dθ, so ω is the
/// plain mean of D - 1 over (v, θ) in [0,1]x[0,π].
inline QuadratureResult holder_mean(const BeltramiField& mu, double t, double r,
                                    const QuadOptions& opt = {}) {
  if (!(r > 0.0)) throw InvalidSpec("holder_mean needs r > 0");
  if (mu.domain() != Domain::UpperHalfPlane)
    throw DomainMismatch("holder_mean needs a half-plane field");
  QuadratureResult q = integrate_rectangle(
      0.0, 1.0, 0.0, pi,
      [&](double v, double th) {
        const MuSample m = mu.evaluate(Complex(t, 0.0) + std::polar(r * std::sqrt(v), th));
        const Complex rot = std::polar(1.0, -2.0 * th);
        return CellValue{detail::halfplane_flat_kernel(KernelKind::DPlusMinusOne, m.value, rot),
                         m.clipped};
      },
      opt);
  q.value /= pi;
  q.abs_error_estimate /= pi;
  return q;
}

// ---------------------------------------------------------------------------
// Carleson's η(s) = ess sup_{0<Im z<s} |μ|
// ---------------------------------------------------------------------------

struct EtaOptions {
  double x_lo = -1.0;
  double x_hi = 1.0;
  int nx = 9;
  int per_decade = 4096;     // log-uniform y samples per decade
  double y_floor_ratio = 1e-6;  // smallest sampled height relative to the lower endpoint
  double refine_tol = 1e-3;
  int max_doublings = 3;
};

/// Grid supremum of |μ| over heights y_j with x on a uniform window. This is
/// a lower bound of the essential supremum.
struct EtaProfile {
  std::vector<double> y;    // increasing
  std::vector<double> eta;  // eta[j] = max over samples with height <= y[j]
};

inline EtaProfile eta_profile(const BeltramiField& mu, double y_min, double y_max,
                              int per_decade, int nx, double x_lo, double x_hi) {
  if (mu.domain() != Domain::UpperHalfPlane)
    throw DomainMismatch("Carleson's condition needs a half-plane field");
  if (!(y_min > 0.0 && y_min < y_max)) throw InvalidSpec("need 0 < y_min < y_max");
  const double decades = std::log10(y_max / y_min);
  const auto n = static_cast<std::size_t>(std::ceil(decades * per_decade)) + 1;
  EtaProfile p;
  p.y.resize(n);
  p.eta.resize(n);
  double running = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double y = y_min * std::pow(y_max / y_min, static_cast<double>(j) /
                                                         static_cast<double>(n - 1));
    double m = 0.0;
    for (int k = 0; k < nx; ++k) {
      const double x = nx == 1 ? 0.5 * (x_lo + x_hi)
                               : x_lo + (x_hi - x_lo) * k / static_cast<double>(nx - 1);
      m = std::max(m, std::abs(mu(Complex(x, y))));
    }
    running = std::max(running, m);
    p.y[j] = y;
    p.eta[j] = running;
  }
  return p;
}

inline double carleson_eta(const BeltramiField& mu, double s, const EtaOptions& opt = {}) {
  if (!(s > 0.0)) throw InvalidSpec("carleson_eta needs s > 0");
  int per_decade = opt.per_decade, nx = opt.nx;
  auto sup_below = [&](int pd, int n) {
    const EtaProfile p =
        eta_profile(mu, s * opt.y_floor_ratio, s, pd, n, opt.x_lo, opt.x_hi);
    // the last node sits at y = s, outside the open strip
    return p.eta.size() >= 2 ? p.eta[p.eta.size() - 2] : 0.0;
  };
  double prev = sup_below(per_decade, nx);
  for (int d = 0; d < opt.max_doublings; ++d) {
    per_decade *= 2;
    nx = 2 * nx - 1;
    const double cur = sup_below(per_decade, nx);
    if (cur - prev <= opt.refine_tol) return cur;
    prev = cur;
  }
  throw GridTooCoarse("eta still increasing at the finest sampling grid");
}

/// ∫_{s0}^{s1} η(s)/s ds with the integrand piecewise constant between
/// log-spaced heights: η on (y_j, y_{j+1}] is the sup over heights <= y_j.
struct CarlesonProfile {
  std::vector<double> eps;       // lower limits, decreasing
  std::vector<double> integral;  // ∫_{eps}^{s1} η(s)/s ds
};

namespace detail {
inline double carleson_from_profile(const EtaProfile& p, double s0, double s1) {
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < p.y.size(); ++j) {
    const double lo = std::max(p.y[j], s0), hi = std::min(p.y[j + 1], s1);
    if (hi > lo) total += p.eta[j] * std::log(hi / lo);
  }
  return total;
}
}  // namespace detail

inline QuadratureResult carleson_integral(const BeltramiField& mu, double s0, double s1,
                                          const EtaOptions& opt = {}) {
  if (!(s0 > 0.0 && s0 < s1)) throw InvalidSpec("need 0 < s0 < s1");
  const double y_min = s0 * opt.y_floor_ratio;
  const EtaProfile coarse = eta_profile(mu, y_min, s1, opt.per_decade / 2,
                                        std::max(1, opt.nx / 2 + 1), opt.x_lo, opt.x_hi);
  const EtaProfile fine = eta_profile(mu, y_min, s1, opt.per_decade, opt.nx, opt.x_lo, opt.x_hi);
  QuadratureResult q;
  q.value = detail::carleson_from_profile(fine, s0, s1);
  q.abs_error_estimate = std::abs(q.value - detail::carleson_from_profile(coarse, s0, s1));
  q.cells = fine.y.size() * static_cast<std::size_t>(opt.nx);
  q.converged = true;
  return q;
}

// ---------------------------------------------------------------------------
// Limit probes
// ---------------------------------------------------------------------------

enum class LimitStatus { ConvergesTo, Diverges, Inconclusive };

inline const char* to_string(LimitStatus s) {
  switch (s) {
    case LimitStatus::ConvergesTo: return "ConvergesTo";
    case LimitStatus::Diverges: return "Diverges";
    case LimitStatus::Inconclusive: return "Inconclusive";
  }
  return "?";
}

struct LimitVerdict {
  LimitStatus status = LimitStatus::Inconclusive;
  double value = 0.0;  // meaningful for ConvergesTo
  std::vector<std::pair<double, double>> trace;  // (parameter, value)

  bool converges() const { return status == LimitStatus::ConvergesTo; }
  bool diverges() const { return status == LimitStatus::Diverges; }
  bool converges_to_zero(double tol) const { return converges() && std::abs(value) <= tol; }
};

struct ProbeOptions {
  double cauchy_tol = 1e-4;
  double diverge_threshold = 1e3;
};

/// r_k = R * ratio^k for k = first..first+count-1.
inline std::vector<double> geometric_schedule(double R, int count = 24, double ratio = 0.5,
                                              int first = 1) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = first; k < first + count; ++k) out.push_back(R * std::pow(ratio, k));
  return out;
}

/// ConvergesTo iff the last three values are pairwise within cauchy_tol;
/// Diverges iff their magnitudes exceed the threshold and strictly increase.
inline LimitVerdict classify_trace(std::vector<std::pair<double, double>> trace,
                                   const ProbeOptions& opt = {}) {
  LimitVerdict v;
  v.trace = std::move(trace);
  const std::size_t n = v.trace.size();
  if (n < 4) throw BadParams("limit probe needs at least 4 schedule terms");
  const double a = v.trace[n - 3].second, b = v.trace[n - 2].second, c = v.trace[n - 1].second;
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
    v.status = LimitStatus::Inconclusive;
    return v;
  }
  const double spread = std::max({std::abs(a - b), std::abs(b - c), std::abs(a - c)});
  if (spread <= opt.cauchy_tol) {
    v.status = LimitStatus::ConvergesTo;
    v.value = c;
    return v;
  }
  const double ma = std::abs(a), mb = std::abs(b), mc = std::abs(c);
  if (ma > opt.diverge_threshold && mb > ma && mc > mb) {
    v.status = LimitStatus::Diverges;
    return v;
  }
  v.status = LimitStatus::Inconclusive;
  return v;
}

inline void check_schedule(std::span<const double> schedule) {
  if (schedule.size() < 4) throw BadParams("schedule needs at least 4 terms");
  const bool inc = schedule[1] > schedule[0];
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (inc ? !(schedule[i] > schedule[i - 1]) : !(schedule[i] < schedule[i - 1]))
      throw BadParams("schedule must be strictly monotone");
  }
}

template <typename Evaluator>
LimitVerdict limit_probe(const Evaluator& evaluator, std::span<const double> schedule,
                         const ProbeOptions& opt = {}) {
  check_schedule(schedule);
  std::vector<std::pair<double, double>> trace;
  trace.reserve(schedule.size());
  for (double p : schedule) trace.emplace_back(p, static_cast<double>(evaluator(p)));
  return classify_trace(std::move(trace), opt);
}

}  // namespace qcb
