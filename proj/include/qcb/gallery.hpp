/// \file
/// Explicit homeomorphisms with known Beltrami coefficients, plus the builtin
/// coefficient fields used as fixtures (zero, constant, synthetic strip
/// fields, compact bumps). Everything is addressable by name + params.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcb/core.hpp"

namespace qcb {

struct NamedMap {
  using Evaluator = std::function<Complex(Complex)>;

  std::string name;
  Domain domain = Domain::UpperHalfPlane;
  Evaluator forward;
  std::optional<Evaluator> boundary;  // on R (H) or on the unit circle (D), where continuous
  std::optional<Evaluator> mu_closed_form;
  Params params;

  Complex operator()(Complex z) const { return forward(z); }

  BeltramiField field(double clip_epsilon = 1e-9) const {
    if (!mu_closed_form) throw BadParams(name + " has no closed-form coefficient");
    return BeltramiField(domain, *mu_closed_form, name, params, clip_epsilon);
  }
};

struct ParamSchema {
  std::string name;
  double default_value;
  std::string description;
};

struct CatalogEntry {
  std::string name;
  bool is_map;  // false: coefficient field only
  std::string domain;
  std::vector<ParamSchema> params;
  std::string description;
};

namespace detail {

inline double param_or(const Params& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

inline void check_known(const Params& p, std::initializer_list<const char*> keys,
                        const std::string& who) {
  for (const auto& [k, v] : p) {
    bool ok = false;
    for (const char* known : keys) ok = ok || k == known;
    if (!ok) throw BadParams(who + ": unknown parameter '" + k + "'");
    if (!std::isfinite(v)) throw BadParams(who + ": parameter '" + k + "' is not finite");
  }
}

inline Domain domain_flag(const Params& p) {
  return param_or(p, "disk", 0.0) != 0.0 ? Domain::UnitDisk : Domain::UpperHalfPlane;
}

// φ(y) = y sin(1/y) on 0 < |y| < 1/π, zero elsewhere; the seam takes the
// value from above.
inline double shear_phi(double y) {
  const double a = std::abs(y);
  return (a > 0.0 && a < 1.0 / pi) ? y * std::sin(1.0 / y) : 0.0;
}
inline double shear_phi_prime(double y) {
  const double a = std::abs(y);
  return (a > 0.0 && a < 1.0 / pi) ? std::sin(1.0 / y) - std::cos(1.0 / y) / y : 0.0;
}

// prime_end_twist angle Φ(ρ, θ) = sgn θ · π (|θ|/π)^{p(ρ)}, p = -log(1-ρ).
struct TwistAngle {
  double phi, d_theta, d_rho;
};
inline TwistAngle prime_end_angle(double rho, double theta) {
  const double p = -std::log1p(-rho);
  const double dp = 1.0 / (1.0 - rho);
  const double u = std::abs(theta) / pi;
  const double sg = theta < 0.0 ? -1.0 : 1.0;
  if (u == 0.0) {
    // θ -> 0+ branch
    const double dth = p < 1.0 ? std::numeric_limits<double>::infinity() : (p == 1.0 ? 1.0 : 0.0);
    return {0.0, dth, 0.0};
  }
  const double up = std::pow(u, p);
  return {sg * pi * up, p * std::pow(u, p - 1.0), sg * pi * up * std::log(u) * dp};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Maps
// ---------------------------------------------------------------------------

/// f(z) = z |z|^{K-1} on H (default) or D (disk = 1).
inline NamedMap radial_stretch(double K, Domain domain = Domain::UpperHalfPlane) {
  if (!(K > 0.0 && std::isfinite(K))) throw BadParams("radial_stretch: K must be > 0");
  NamedMap m;
  m.name = "radial_stretch";
  m.domain = domain;
  m.params = {{"K", K}, {"disk", domain == Domain::UnitDisk ? 1.0 : 0.0}};
  m.forward = [K](Complex z) {
    const double a = std::abs(z);
    return a == 0.0 ? Complex(0.0, 0.0) : z * std::pow(a, K - 1.0);
  };
  m.boundary = m.forward;
  const double c = (K - 1.0) / (K + 1.0);
  m.mu_closed_form = [c](Complex z) {
    return z == Complex(0.0, 0.0) ? Complex(0.0, 0.0) : c * z / std::conj(z);
  };
  return m;
}

inline NamedMap identity_map(Domain domain = Domain::UpperHalfPlane) {
  NamedMap m = radial_stretch(1.0, domain);
  m.name = "identity";
  m.params = {{"disk", domain == Domain::UnitDisk ? 1.0 : 0.0}};
  return m;
}

/// tanh(π z/4) on the strip 0 < y <= 1 and y tanh(π(x+i)/4) above it.
inline NamedMap tanh_strip() {
  NamedMap m;
  m.name = "tanh_strip";
  m.domain = Domain::UpperHalfPlane;
  const double q = pi / 4.0;
  m.forward = [q](Complex z) {
    if (z.imag() <= 1.0) return std::tanh(q * z);
    return z.imag() * std::tanh(q * Complex(z.real(), 1.0));
  };
  m.boundary = [q](Complex t) { return Complex(std::tanh(q * t.real()), 0.0); };
  m.mu_closed_form = [q](Complex z) {
    if (z.imag() < 1.0) return Complex(0.0, 0.0);
    const Complex a = q * Complex(z.real(), 1.0);
    const Complex ch = std::cosh(a);
    const Complex fx = z.imag() * q / (ch * ch);
    const Complex fy = std::tanh(a);
    const Complex i(0.0, 1.0);
    return (fx + i * fy) / (fx - i * fy);
  };
  return m;
}

/// x + φ(y) + iy with φ(y) = y sin(1/y) near the axis.
inline NamedMap shear() {
  NamedMap m;
  m.name = "shear";
  m.domain = Domain::UpperHalfPlane;
  m.forward = [](Complex z) {
    return Complex(z.real() + detail::shear_phi(z.imag()), z.imag());
  };
  m.boundary = [](Complex t) { return Complex(t.real(), 0.0); };
  m.mu_closed_form = [](Complex z) {
    const Complex ip(0.0, detail::shear_phi_prime(z.imag()));
    return ip / (2.0 - ip);
  };
  return m;
}

/// r e^{i(θ - log(1-r))}: a disk homeomorphism without boundary extension.
inline NamedMap radial_twist() {
  NamedMap m;
  m.name = "radial_twist";
  m.domain = Domain::UnitDisk;
  m.forward = [](Complex z) {
    const double rho = std::abs(z);
    return z * std::polar(1.0, -std::log1p(-rho));
  };
  m.mu_closed_form = [](Complex z) {
    const double rho = std::abs(z);
    if (rho == 0.0) return Complex(0.0, 0.0);
    const Complex ia(0.0, rho / (2.0 * (1.0 - rho)));
    return ia / (1.0 + ia) * (z / std::conj(z));
  };
  return m;
}

/// r e^{iπ(θ/π)^{-log(1-r)}} on 0 <= θ <= π, extended by f(z̄) = conj f(z).
/// Continuous at 1 with f(1) = 1.
inline NamedMap prime_end_twist() {
  NamedMap m;
  m.name = "prime_end_twist";
  m.domain = Domain::UnitDisk;
  m.forward = [](Complex z) {
    const double rho = std::abs(z);
    if (rho == 0.0) return Complex(0.0, 0.0);
    return std::polar(rho, detail::prime_end_angle(rho, std::arg(z)).phi);
  };
  m.mu_closed_form = [](Complex z) {
    const double rho = std::abs(z);
    if (rho == 0.0) return Complex(0.0, 0.0);
    const double th = std::arg(z);
    const auto a = detail::prime_end_angle(rho, th);
    const Complex rot = std::polar(1.0, 2.0 * th);
    if (std::isinf(a.d_theta)) return -rot;
    const Complex num(1.0 - a.d_theta, rho * a.d_rho);
    const Complex den(1.0 + a.d_theta, rho * a.d_rho);
    return rot * num / den;
  };
  return m;
}

inline std::vector<CatalogEntry> gallery_catalog() {
  return {
      {"radial_stretch", true, "upper_half_plane|unit_disk",
       {{"K", 2.0, "stretch exponent, K > 0"}, {"disk", 0.0, "1 for the unit-disk version"}},
       "f(z) = z|z|^(K-1)"},
      {"tanh_strip", true, "upper_half_plane", {},
       "tanh(pi z/4) for 0<y<=1, y tanh(pi(x+i)/4) above; not continuous at infinity"},
      {"shear", true, "upper_half_plane", {}, "x + y sin(1/y) + iy near the axis; not ACL"},
      {"radial_twist", true, "unit_disk", {}, "r exp i(theta - log(1-r)); no boundary extension"},
      {"prime_end_twist", true, "unit_disk", {},
       "r exp i pi (theta/pi)^(-log(1-r)), reflected; continuous only at 1"},
      {"zero", false, "upper_half_plane|unit_disk", {{"disk", 0.0, "1 for the unit disk"}},
       "mu = 0"},
      {"constant", false, "upper_half_plane|unit_disk",
       {{"re", 0.5, "real part"}, {"im", 0.0, "imaginary part"}, {"disk", 0.0, "1 for the unit disk"}},
       "mu = re + i im"},
      {"scalar_y", false, "upper_half_plane", {}, "mu = y for y < 1, 0 above"},
      {"compact_bump", false, "upper_half_plane|unit_disk",
       {{"cx", 0.0, "center x"}, {"cy", 0.0, "center y"}, {"radius", 0.25, "support radius"},
        {"amp", 0.5, "peak |mu|, < 1"}, {"disk", 1.0, "1 for the unit disk"}},
       "mu = amp (1 - |z-c|^2/radius^2)^2 inside the disk |z-c| < radius"},
  };
}

inline NamedMap gallery_map(const std::string& name, const Params& params = {}) {
  using detail::check_known;
  if (name == "radial_stretch") {
    check_known(params, {"K", "disk"}, name);
    return radial_stretch(detail::param_or(params, "K", 2.0), detail::domain_flag(params));
  }
  if (name == "tanh_strip") { check_known(params, {}, name); return tanh_strip(); }
  if (name == "shear") { check_known(params, {}, name); return shear(); }
  if (name == "radial_twist") { check_known(params, {}, name); return radial_twist(); }
  if (name == "prime_end_twist") { check_known(params, {}, name); return prime_end_twist(); }
  if (name == "identity") {
    check_known(params, {"disk"}, name);
    return identity_map(detail::domain_flag(params));
  }
  throw UnknownName("gallery map '" + name + "'");
}

/// Builtin coefficient fields; every gallery map name is accepted as well.
inline BeltramiField make_field(const std::string& name, const Params& params = {},
                                double clip_epsilon = 1e-9) {
  using detail::check_known;
  using detail::param_or;
  if (name == "zero") {
    check_known(params, {"disk"}, name);
    return BeltramiField(detail::domain_flag(params), [](Complex) { return Complex(0.0, 0.0); },
                         name, params, clip_epsilon);
  }
  if (name == "constant") {
    check_known(params, {"re", "im", "disk"}, name);
    const Complex c(param_or(params, "re", 0.5), param_or(params, "im", 0.0));
    if (std::abs(c) >= 1.0) throw BadParams("constant: |mu| must be < 1");
    return BeltramiField(detail::domain_flag(params), [c](Complex) { return c; }, name, params,
                         clip_epsilon);
  }
  if (name == "scalar_y") {
    check_known(params, {}, name);
    return BeltramiField(
        Domain::UpperHalfPlane,
        [](Complex z) { return Complex(z.imag() < 1.0 ? z.imag() : 0.0, 0.0); }, name, params,
        clip_epsilon);
  }
  if (name == "compact_bump") {
    check_known(params, {"cx", "cy", "radius", "amp", "disk"}, name);
    const Complex c(param_or(params, "cx", 0.0), param_or(params, "cy", 0.0));
    const double rad = param_or(params, "radius", 0.25);
    const double amp = param_or(params, "amp", 0.5);
    if (!(rad > 0.0)) throw BadParams("compact_bump: radius must be > 0");
    if (!(std::abs(amp) < 1.0)) throw BadParams("compact_bump: |amp| must be < 1");
    Params p = params;
    if (!p.count("disk")) p["disk"] = 1.0;
    return BeltramiField(
        detail::domain_flag(p),
        [c, rad, amp](Complex z) {
          const double q = std::norm(z - c) / (rad * rad);
          return Complex(q < 1.0 ? amp * (1.0 - q) * (1.0 - q) : 0.0, 0.0);
        },
        name, p, clip_epsilon);
  }
  return gallery_map(name, params).field(clip_epsilon);
}

// ---------------------------------------------------------------------------
// Finite-difference oracle
// ---------------------------------------------------------------------------

struct WirtingerResult {
  Complex fz, fzbar, mu_fd;
};

/// Central differences for f_z and f_z̄ on the 4-point stencil z ± h, z ± ih.
inline WirtingerResult wirtinger_check(const NamedMap& map, Complex z, double h) {
  const Complex i(0.0, 1.0);
  for (Complex p : {z + h, z - h, z + i * h, z - i * h})
    if (!in_domain(map.domain, p)) throw StencilOutOfDomain("stencil leaves the domain");
  const Complex dx = map(z + h) - map(z - h);
  const Complex dy = map(z + i * h) - map(z - i * h);
  WirtingerResult r;
  r.fz = (dx - i * dy) / (4.0 * h);
  r.fzbar = (dx + i * dy) / (4.0 * h);
  r.mu_fd = r.fzbar / r.fz;
  return r;
}

/// Length of the polyline through n+1 equally spaced images of [a, b].
inline double polyline_length(const NamedMap& map, Complex a, Complex b, std::size_t n) {
  if (n == 0) throw BadParams("polyline needs n >= 1");
  double len = 0.0;
  Complex prev = map(a);
  for (std::size_t k = 1; k <= n; ++k) {
    const Complex cur = map(a + (b - a) * (static_cast<double>(k) / static_cast<double>(n)));
    len += std::abs(cur - prev);
    prev = cur;
  }
  return len;
}

}  // namespace qcb
