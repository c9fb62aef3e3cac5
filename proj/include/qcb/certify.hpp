/// \file
/// Boundary-regularity certificates. Every positive conclusion rests on
/// limit probes over integral traces; a quadrature that missed its tolerance
/// can only weaken a verdict (ConvergesTo -> Inconclusive), never produce one.
///
/// Conditions on μ alone (certify_*) are kept apart from checks that need
/// the map itself (extension_divergence_check, empirical_boundary_exponent).

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qcb/core.hpp"
#include "qcb/gallery.hpp"
#include "qcb/modulus.hpp"
#include "qcb/quad.hpp"

namespace qcb {

enum class Conclusion { NotCertified, ContinuousExtension, Differentiable, LocallyLipschitz, Holder };

inline const char* to_string(Conclusion c) {
  switch (c) {
    case Conclusion::NotCertified: return "NotCertified";
    case Conclusion::ContinuousExtension: return "ContinuousExtension";
    case Conclusion::Differentiable: return "Differentiable";
    case Conclusion::LocallyLipschitz: return "LocallyLipschitz";
    case Conclusion::Holder: return "Holder";
  }
  return "?";
}

struct VerdictEntry {
  std::string condition;
  std::optional<LimitVerdict> limit;
  std::optional<double> bound;  // sup-type conditions
  bool quadrature_converged = true;
  std::string note;
};

struct NamedTrace {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

struct RegularityCertificate {
  std::string subject;  // point | interval | disk_point | infinity
  std::optional<double> t;
  std::optional<std::pair<double, double>> interval;
  std::optional<Complex> zeta;
  std::vector<double> t_grid;
  std::vector<double> schedule;
  std::vector<VerdictEntry> verdicts;
  std::vector<NamedTrace> traces;
  std::optional<double> derivative;
  std::optional<double> M;
  std::optional<double> alpha;
  Conclusion conclusion = Conclusion::NotCertified;
  std::vector<std::string> warnings;
  double max_clipped_fraction = 0.0;

  const VerdictEntry* verdict(std::string_view name) const {
    for (const auto& v : verdicts)
      if (v.condition == name) return &v;
    return nullptr;
  }
  const NamedTrace* trace(std::string_view name) const {
    for (const auto& t : traces)
      if (t.name == name) return &t;
    return nullptr;
  }
};

struct CertifyOptions {
  QuadOptions quad{1e-6, 1e-6};
  ProbeOptions probe{};
  int schedule_count = 24;
  int t_grid_points = 33;
  double lipschitz_cap = 10.0;
};

namespace detail {

/// Non-converged quadrature may support Diverges but never ConvergesTo.
inline LimitVerdict guard(LimitVerdict v, bool converged) {
  if (!converged && v.converges()) {
    v.status = LimitStatus::Inconclusive;
    v.value = 0.0;
  }
  return v;
}

inline std::vector<double> default_schedule(const std::vector<double>& given, double R0, int count) {
  std::vector<double> s = given.empty() ? geometric_schedule(R0, count) : given;
  check_schedule(s);
  if (!(s.front() > s.back())) throw BadParams("radius schedule must decrease");
  if (!(s.front() <= R0 && s.back() > 0.0)) throw BadParams("schedule must lie in (0, R0]");
  return s;
}

/// Per-radius integrals shared by the half-plane and disk point certificates:
/// e-ratio tails of the two condition kernels and the pieces between
/// consecutive schedule radii (cumulated into G, H).
struct PointTraces {
  std::vector<std::pair<double, double>> tail1, tail2, cum1, cum2, G, H, bj;
  bool conv_tail1 = true, conv_tail2 = true, conv_cum = true, conv_bj = true;
  double clipped = 0.0;
};

template <typename Integral>
PointTraces collect_point_traces(const std::vector<double>& schedule, double R0,
                                 const Integral& integral, bool with_bj, double scale) {
  PointTraces p;
  double c1 = 0.0, c2 = 0.0, cb = 0.0, prev = R0;
  for (double r : schedule) {
    const QuadratureResult t1 = integral(r / std::exp(1.0), r, 0);
    const QuadratureResult t2 = integral(r / std::exp(1.0), r, 1);
    p.tail1.emplace_back(r, scale * t1.value);
    p.tail2.emplace_back(r, scale * t2.value);
    p.conv_tail1 = p.conv_tail1 && t1.converged;
    p.conv_tail2 = p.conv_tail2 && t2.converged;
    p.clipped = std::max({p.clipped, t1.clipped_fraction, t2.clipped_fraction});
    if (r < prev) {
      const QuadratureResult a = integral(r, prev, 0);
      const QuadratureResult b = integral(r, prev, 1);
      c1 += scale * a.value;
      c2 += scale * b.value;
      p.conv_cum = p.conv_cum && a.converged && b.converged;
      p.clipped = std::max({p.clipped, a.clipped_fraction, b.clipped_fraction});
      if (with_bj) {
        const QuadratureResult q = integral(r, prev, 2);
        cb += q.value;
        p.conv_bj = p.conv_bj && q.converged;
      }
    }
    prev = r;
    p.cum1.emplace_back(r, c1);
    p.cum2.emplace_back(r, c2);
    // D± - 1 = 2|μ|²/(1-|μ|²) ∓ 2 Re(rot μ)/(1-|μ|²) in flattened form
    p.G.emplace_back(r, 2.0 * c1 - 2.0 * c2);
    p.H.emplace_back(r, 2.0 * c1 + 2.0 * c2);
    if (with_bj) p.bj.emplace_back(r, cb);
  }
  return p;
}

inline void fill_point_certificate(RegularityCertificate& cert, const PointTraces& p,
                                   const char* cond1, const char* cond2, const ProbeOptions& probe) {
  // Condition (1): tails must vanish; for a nonnegative kernel the condition
  // fails exactly when the cumulative integral escapes.
  LimitVerdict v1 = guard(classify_trace(p.tail1, probe), p.conv_tail1);
  std::string note1;
  if (!v1.converges()) {
    const LimitVerdict cum = classify_trace(p.cum1, probe);
    if (cum.diverges()) {
      v1.status = LimitStatus::Diverges;
      note1 = "cumulative integral escapes";
    }
  }
  const LimitVerdict v2 = guard(classify_trace(p.tail2, probe), p.conv_tail2);
  const LimitVerdict vg = guard(classify_trace(p.G, probe), p.conv_cum);
  const LimitVerdict vh = guard(classify_trace(p.H, probe), p.conv_cum);
  cert.verdicts.push_back({cond1, v1, std::nullopt, p.conv_tail1, note1});
  cert.verdicts.push_back({cond2, v2, std::nullopt, p.conv_tail2, ""});
  cert.verdicts.push_back({"G", vg, std::nullopt, p.conv_cum, ""});
  cert.verdicts.push_back({"H", vh, std::nullopt, p.conv_cum, ""});
  cert.traces.push_back({std::string(cond1) + "_tail", p.tail1});
  cert.traces.push_back({std::string(cond2) + "_tail", p.tail2});
  cert.traces.push_back({std::string(cond1) + "_cumulative", p.cum1});
  cert.traces.push_back({std::string(cond2) + "_cumulative", p.cum2});
  cert.traces.push_back({"G", p.G});
  cert.traces.push_back({"H", p.H});
  cert.max_clipped_fraction = p.clipped;
  if (p.clipped > 0.0)
    cert.warnings.push_back("clipped fraction " + std::to_string(p.clipped));
  if (!p.conv_tail1 || !p.conv_tail2 || !p.conv_cum)
    cert.warnings.push_back("ToleranceNotReached in at least one quadrature");

  const double tol = probe.cauchy_tol;
  if (v1.converges_to_zero(tol) && v2.converges_to_zero(tol) && vg.converges() && vh.converges())
    cert.conclusion = Conclusion::Differentiable;
  else if (vg.converges())
    cert.conclusion = Conclusion::ContinuousExtension;  // mod f(A) = log(1/r) + O(1)
  else
    cert.conclusion = Conclusion::NotCertified;
}

}  // namespace detail

/// Conditions (1), (2) and the finiteness of G, H at a boundary point t.
inline RegularityCertificate certify_point(const BeltramiField& mu, double t, double R0,
                                           std::vector<double> schedule = {},
                                           const CertifyOptions& opt = {}) {
  if (mu.domain() != Domain::UpperHalfPlane) throw DomainMismatch("certify_point needs a half-plane field");
  if (!std::isfinite(t) || !(R0 > 0.0)) throw BadParams("need finite t and R0 > 0");
  RegularityCertificate cert;
  cert.subject = "point";
  cert.t = t;
  cert.schedule = detail::default_schedule(schedule, R0, opt.schedule_count);
  static constexpr KernelKind kinds[3] = {KernelKind::SquaredModulus, KernelKind::RealQuadratic,
                                          KernelKind::BrakalovaJenkins};
  const auto p = detail::collect_point_traces(
      cert.schedule, R0,
      [&](double a, double b, int which) {
        return annulus_integral(mu, SemiannulusSpec::half_plane(t, a, b), kinds[which], opt.quad);
      },
      true, 1.0);
  detail::fill_point_certificate(cert, p, "Cond1", "Cond2", opt.probe);
  const LimitVerdict bj = detail::guard(classify_trace(p.bj, opt.probe), p.conv_bj);
  cert.verdicts.push_back({"BrakalovaJenkins", bj, std::nullopt, p.conv_bj, "informational"});
  cert.traces.push_back({"BrakalovaJenkins_cumulative", p.bj});
  return cert;
}

/// Conditions (i), (ii) at ζ ∈ ∂D over T(ζ; r/e, r). Traces are reported at
/// the half-plane scale of the pulled-back field (4x the disk kernels) so the
/// verdicts are comparable with certify_point on μ̂ at t = 0.
inline RegularityCertificate certify_disk_point(const BeltramiField& mu, Complex zeta, double R0 = 1.0,
                                                std::vector<double> schedule = {},
                                                const CertifyOptions& opt = {}) {
  if (mu.domain() != Domain::UnitDisk) throw DomainMismatch("certify_disk_point needs a disk field");
  if (std::abs(std::abs(zeta) - 1.0) > 1e-12) throw InvalidSpec("zeta must have unit modulus");
  RegularityCertificate cert;
  cert.subject = "disk_point";
  cert.zeta = zeta;
  cert.schedule = detail::default_schedule(schedule, R0, opt.schedule_count);
  static constexpr KernelKind kinds[2] = {KernelKind::DiskSquared, KernelKind::DiskReal};
  const auto p = detail::collect_point_traces(
      cert.schedule, R0,
      [&](double a, double b, int which) {
        return annulus_integral(mu, SemiannulusSpec::disk(zeta, a, b), kinds[which], opt.quad);
      },
      false, 4.0);
  detail::fill_point_certificate(cert, p, "DiskCond_i", "DiskCond_ii", opt.probe);
  return cert;
}

namespace detail {
inline std::vector<double> t_grid(double a, double b, int points) {
  if (!(a <= b)) throw BadParams("interval must satisfy a <= b");
  if (a == b) return {a};
  if (points < 2) throw BadParams("t grid needs >= 2 points");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) g[static_cast<std::size_t>(k)] = a + (b - a) * k / (points - 1.0);
  return g;
}
}  // namespace detail

/// sup over the (t, r) grid of ∬_{A(t;r,R)} (|μ|² - Re(rot μ))/(1-|μ|²) dxdy/|z-t|²,
/// i.e. half the DPlusMinusOne integral. A degenerate interval [t, t] is a single point.
inline RegularityCertificate certify_lipschitz(const BeltramiField& mu, std::pair<double, double> I,
                                               double R, std::optional<double> M_cap = std::nullopt,
                                               std::vector<double> schedule = {},
                                               const CertifyOptions& opt = {}) {
  if (mu.domain() != Domain::UpperHalfPlane) throw DomainMismatch("certify_lipschitz needs a half-plane field");
  if (!(R > 0.0)) throw BadParams("R must be positive");
  RegularityCertificate cert;
  cert.subject = "interval";
  cert.interval = I;
  cert.t_grid = detail::t_grid(I.first, I.second, opt.t_grid_points);
  cert.schedule = detail::default_schedule(schedule, R, opt.schedule_count);
  const double cap = M_cap.value_or(opt.lipschitz_cap);
  double sup = -std::numeric_limits<double>::infinity();
  bool converged = true;
  for (double t : cert.t_grid) {
    NamedTrace tr{"Lipschitz_t=" + std::to_string(t), {}};
    double cum = 0.0, prev = R;
    for (double r : cert.schedule) {
      if (r < prev) {
        const QuadratureResult q = annulus_integral(mu, SemiannulusSpec::half_plane(t, r, prev),
                                                    KernelKind::DPlusMinusOne, opt.quad);
        cum += 0.5 * q.value;
        converged = converged && q.converged;
        cert.max_clipped_fraction = std::max(cert.max_clipped_fraction, q.clipped_fraction);
      }
      prev = r;
      tr.points.emplace_back(r, cum);
      sup = std::max(sup, cum);
    }
    cert.traces.push_back(std::move(tr));
  }
  VerdictEntry v{"Lipschitz", std::nullopt, sup, converged, "sup over the (t, r) grid"};
  cert.verdicts.push_back(v);
  cert.M = sup;
  if (!converged) cert.warnings.push_back("ToleranceNotReached in at least one quadrature");
  if (cert.t_grid.size() > 1)
    cert.warnings.push_back("local uniformity checked on a finite t grid only");
  cert.conclusion = converged && sup <= cap ? Conclusion::LocallyLipschitz : Conclusion::NotCertified;
  return cert;
}

/// α = 1/(1 + max_t limsup ω(t; r) + cauchy_tol), capped at 1.
inline RegularityCertificate certify_holder(const BeltramiField& mu, std::pair<double, double> I,
                                            double R = 1.0, std::vector<double> schedule = {},
                                            const CertifyOptions& opt = {}) {
  if (mu.domain() != Domain::UpperHalfPlane) throw DomainMismatch("certify_holder needs a half-plane field");
  RegularityCertificate cert;
  cert.subject = "interval";
  cert.interval = I;
  cert.t_grid = detail::t_grid(I.first, I.second, opt.t_grid_points);
  cert.schedule = detail::default_schedule(schedule, R, opt.schedule_count);
  bool all_converge = true, quad_ok = true;
  double worst = -std::numeric_limits<double>::infinity();
  for (double t : cert.t_grid) {
    std::vector<std::pair<double, double>> tr;
    bool conv = true;
    for (double r : cert.schedule) {
      const QuadratureResult q = holder_mean(mu, t, r, opt.quad);
      tr.emplace_back(r, q.value);
      conv = conv && q.converged;
      cert.max_clipped_fraction = std::max(cert.max_clipped_fraction, q.clipped_fraction);
    }
    const LimitVerdict v = detail::guard(classify_trace(tr, opt.probe), conv);
    quad_ok = quad_ok && conv;
    all_converge = all_converge && v.converges();
    if (v.converges()) worst = std::max(worst, v.value);
    cert.traces.push_back({"omega_t=" + std::to_string(t), tr});
    if (cert.t_grid.size() == 1) cert.verdicts.push_back({"Holder", v, std::nullopt, conv, ""});
  }
  if (cert.t_grid.size() > 1) {
    VerdictEntry v{"Holder", std::nullopt, all_converge ? std::optional<double>(worst) : std::nullopt,
                   quad_ok, "max over the t grid of the stabilised omega"};
    cert.verdicts.push_back(v);
    cert.warnings.push_back("local uniformity checked on a finite t grid only");
  }
  if (!quad_ok) cert.warnings.push_back("ToleranceNotReached in at least one quadrature");
  if (all_converge) {
    cert.alpha = std::min(1.0, 1.0 / (1.0 + worst + opt.probe.cauchy_tol));
    cert.conclusion = *cert.alpha > 0.0 ? Conclusion::Holder : Conclusion::NotCertified;
  }
  return cert;
}

/// (1/(log R)²) ∬_{A(0;r0,R)} (|μ|² - Re(z̄/z μ))/(1-|μ|²) dxdy/|z|² over R = e^k.
inline RegularityCertificate certify_infinity(const BeltramiField& mu, double r0 = 1.0,
                                              std::vector<double> R_schedule = {},
                                              const CertifyOptions& opt = {}) {
  if (mu.domain() != Domain::UpperHalfPlane) throw DomainMismatch("certify_infinity needs a half-plane field");
  if (!(r0 > 0.0)) throw BadParams("r0 must be positive");
  if (R_schedule.empty())
    for (int k = 1; k <= 12; ++k) R_schedule.push_back(std::exp(static_cast<double>(k)));
  check_schedule(R_schedule);
  if (!(R_schedule.front() > r0) || !(R_schedule.back() > R_schedule.front()))
    throw BadParams("R schedule must increase from above r0");
  RegularityCertificate cert;
  cert.subject = "infinity";
  cert.schedule = R_schedule;
  std::vector<std::pair<double, double>> ratio, q_trace;
  double cum = 0.0, prev = r0;
  bool conv = true;
  for (double R : R_schedule) {
    const QuadratureResult q =
        annulus_integral(mu, SemiannulusSpec::half_plane(0.0, prev, R), KernelKind::InfinityKernel, opt.quad);
    cum += q.value;
    conv = conv && q.converged;
    cert.max_clipped_fraction = std::max(cert.max_clipped_fraction, q.clipped_fraction);
    prev = R;
    const double L = std::log(R);
    ratio.emplace_back(R, cum / (L * L));
    // the kernel is (D - 1)/2 at base 0, so Q - 1 = 2 cum / (π log(R/r0))
    q_trace.emplace_back(R, 1.0 + 2.0 * cum / (pi * std::log(R / r0)));
  }
  const LimitVerdict v = detail::guard(classify_trace(ratio, opt.probe), conv);
  cert.verdicts.push_back({"Infinity", v, std::nullopt, conv, ""});
  cert.traces.push_back({"Infinity_ratio", ratio});
  cert.traces.push_back({"Q", q_trace});
  if (!conv) cert.warnings.push_back("ToleranceNotReached in at least one quadrature");
  cert.conclusion = v.converges_to_zero(opt.probe.cauchy_tol) ? Conclusion::ContinuousExtension
                                                              : Conclusion::NotCertified;
  return cert;
}

/// ∫_ε^1 η(s)/s ds along ε = 2^{-k}; divergence threshold defaults to 10.
inline LimitVerdict carleson_certify(const BeltramiField& mu, std::vector<double> eps_schedule = {},
                                     ProbeOptions probe = {1e-4, 10.0}, const EtaOptions& eta = {}) {
  if (eps_schedule.empty()) eps_schedule = geometric_schedule(1.0, 24);
  check_schedule(eps_schedule);
  const double eps_min = *std::min_element(eps_schedule.begin(), eps_schedule.end());
  if (!(eps_min > 0.0) || *std::max_element(eps_schedule.begin(), eps_schedule.end()) >= 1.0)
    throw BadParams("epsilon schedule must lie in (0, 1)");
  const double y_min = eps_min * eta.y_floor_ratio;
  const EtaProfile fine = eta_profile(mu, y_min, 1.0, eta.per_decade, eta.nx, eta.x_lo, eta.x_hi);
  std::vector<std::pair<double, double>> trace;
  for (double e : eps_schedule) trace.emplace_back(e, detail::carleson_from_profile(fine, e, 1.0));
  return classify_trace(std::move(trace), probe);
}

// ---------------------------------------------------------------------------
// Checks that need the map
// ---------------------------------------------------------------------------

struct ExtensionCheck {
  LimitVerdict verdict;
  double slope = 0.0;
  std::string method;  // pullback | image_mesh
  std::vector<std::string> warnings;
};

inline double least_squares_slope(const std::vector<std::pair<double, double>>& xy, double* rms = nullptr) {
  const double n = static_cast<double>(xy.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : xy) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (!(den > 0.0)) throw BadParams("regression needs distinct abscissae");
  const double slope = (n * sxy - sx * sy) / den, icpt = (sy - slope * sx) / n;
  if (rms) {
    double ss = 0.0;
    for (auto [x, y] : xy) ss += (y - slope * x - icpt) * (y - slope * x - icpt);
    *rms = std::sqrt(ss / n);
  }
  return slope;
}

struct ExtensionOptions {
  std::size_t resolution = 64;
  double slope_diverge = 0.5;  // Diverges: slope >= this and increasing tail
  double slope_bounded = 0.1;  // bounded: slope <= this
  unsigned threads = 1;
};

/// mod f(T(ζ; r, R)) (disk) or mod f(A(t; r, R)∩H) along the schedule. The
/// discrete lower bound mod_primal is traced against log(1/r). With a closed
/// form μ the modulus is computed on the preimage grid (exact geometry),
/// otherwise on the image mesh.
inline ExtensionCheck extension_divergence_check(const NamedMap& map, Complex point, double R,
                                                 std::vector<double> schedule = {},
                                                 const ExtensionOptions& opt = {}) {
  if (schedule.empty()) schedule = geometric_schedule(R, 10);
  check_schedule(schedule);
  ExtensionCheck out;
  out.method = map.mu_closed_form ? "pullback" : "image_mesh";
  std::vector<std::pair<double, double>> trace;
  try {
    for (double r : schedule) {
      const SemiannulusSpec spec = map.domain == Domain::UnitDisk
                                       ? SemiannulusSpec::disk(point, r, R)
                                       : SemiannulusSpec::half_plane(point.real(), r, R);
      ModulusEstimate e;
      if (map.mu_closed_form) {
        PullbackOptions po;
        po.solver.threads = opt.threads;
        e = beltrami_modulus(map.field(), spec, opt.resolution, opt.resolution, po);
      } else {
        SolverOptions so;
        so.threads = opt.threads;
        e = discrete_modulus(mesh_region(map, spec, opt.resolution, opt.resolution), so);
      }
      trace.emplace_back(std::log(1.0 / r), e.mod_primal);
    }
  } catch (const Error& ex) {
    out.warnings.push_back(ex.what());
    out.verdict.trace = trace;
    return out;  // Inconclusive
  }
  out.slope = least_squares_slope(trace);
  out.verdict.trace = trace;
  const std::size_t n = trace.size();
  const bool increasing = trace[n - 1].second > trace[n - 2].second && trace[n - 2].second > trace[n - 3].second;
  if (out.slope >= opt.slope_diverge && increasing) {
    out.verdict.status = LimitStatus::Diverges;
  } else if (out.slope <= opt.slope_bounded) {
    out.verdict.status = LimitStatus::ConvergesTo;  // bounded
    out.verdict.value = trace.back().second;
  }
  return out;
}

struct BoundaryExponent {
  double alpha_hat = 0.0;
  std::optional<double> deriv_hat;
  double residual = 0.0;
  bool poor_fit = false;
};

/// Slope of log|f(t±h) - f(t)| against log h. On the disk the boundary point
/// is ζ and the increments are ζ e^{±ih}.
inline BoundaryExponent empirical_boundary_exponent(const NamedMap& map, Complex point,
                                                    std::vector<double> h_schedule = {},
                                                    double fit_threshold = 0.05) {
  if (!map.boundary) throw BadParams(map.name + " has no boundary function");
  if (h_schedule.empty()) h_schedule = geometric_schedule(1.0, 17, 0.5, 4);  // 2^-4 .. 2^-20
  check_schedule(h_schedule);
  const auto& f = *map.boundary;
  auto at = [&](double h) {
    return map.domain == Domain::UnitDisk ? point * std::polar(1.0, h) : point + h;
  };
  const Complex f0 = f(map.domain == Domain::UnitDisk ? point : Complex(point.real(), 0.0));
  std::vector<std::pair<double, double>> pts;
  double h_min = h_schedule.front(), inc_min = 0.0;
  BoundaryExponent out;
  for (double h : h_schedule) {
    const double dp = std::abs(f(at(h)) - f0), dm = std::abs(f(at(-h)) - f0);
    if (!(dp > 0.0) || !(dm > 0.0) || !std::isfinite(dp) || !std::isfinite(dm)) {
      out.poor_fit = true;
      continue;
    }
    pts.emplace_back(std::log(h), std::log(dp));
    pts.emplace_back(std::log(h), std::log(dm));
    if (h <= h_min) {
      h_min = h;
      inc_min = 0.5 * (dp + dm);
    }
  }
  if (pts.size() < 4) {
    out.poor_fit = true;
    return out;
  }
  out.alpha_hat = least_squares_slope(pts, &out.residual);
  out.poor_fit = out.poor_fit || out.residual > fit_threshold;
  if (std::abs(out.alpha_hat - 1.0) <= 0.05) out.deriv_hat = inc_min / h_min;
  return out;
}

/// Joins a point certificate about μ with the boundary increments of a map
/// solving the Beltrami equation. f'(t) is recorded only when the μ-side
/// says Differentiable and the increments agree (exponent within 0.02 of 1).
inline BoundaryExponent attach_boundary_exponent(RegularityCertificate& cert, const NamedMap& map,
                                                 std::vector<double> h_schedule = {}) {
  if (!cert.t && !cert.zeta) throw BadParams("certificate has no boundary point");
  const Complex pt = cert.zeta ? *cert.zeta : Complex(*cert.t, 0.0);
  const BoundaryExponent b = empirical_boundary_exponent(map, pt, std::move(h_schedule));
  if (cert.conclusion == Conclusion::Differentiable) {
    if (b.deriv_hat && !b.poor_fit && std::abs(b.alpha_hat - 1.0) <= 0.02) {
      cert.derivative = *b.deriv_hat;
    } else {
      cert.warnings.push_back("Differentiable per mu but boundary increments give alpha_hat = " +
                              std::to_string(b.alpha_hat));
    }
  }
  return b;
}

}  // namespace qcb
