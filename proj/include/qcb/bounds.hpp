/// \file
/// Sharp geometric bounds for semiannuli and ring domains, the complement
/// diameters they control, and seeded random configurations to test them on.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "qcb/core.hpp"
#include "qcb/gallery.hpp"
#include "qcb/modulus.hpp"

namespace qcb {

struct BoundConstants {
  double C_disk = 4.0 * std::exp(pi / 2.0);
  double C_halfplane = std::exp(pi);
  double separation_loss = pi;
};

inline const BoundConstants& bound_constants() {
  static const BoundConstants c{};
  return c;
}

/// min{diam U1, diam U2} <= 4 e^{π/2} e^{-mod/2} for a semiannulus in D.
inline double disk_diameter_bound(double mod_S) {
  if (!(mod_S >= 0.0)) throw BadParams("modulus must be >= 0");
  return bound_constants().C_disk * std::exp(-0.5 * mod_S);
}

struct HyperbolicBound {
  double bound;
  SemiannulusSpec witness;
};

/// 2/cosh(mod/2), attained by T(ζ; r, 1/r) with r = e^{-mod/2}.
inline HyperbolicBound hyperbolic_sharp_bound(double mod_T, Complex zeta = {1.0, 0.0}) {
  if (!(mod_T > 0.0) || !std::isfinite(mod_T)) throw BadParams("modulus must be positive");
  const double r = std::exp(-0.5 * mod_T);
  return {2.0 / std::cosh(0.5 * mod_T), SemiannulusSpec::disk(zeta, r, 1.0 / r)};
}

/// sup_{U1} |z - t0| <= e^π dist(t0, U2) e^{-mod}, meaningful only for mod > π.
inline double halfplane_offset_bound(double mod_S, double dist_t0_U2) {
  if (!(mod_S > pi)) throw HypothesisViolated("needs mod S > pi");
  if (!(dist_t0_U2 > 0.0)) throw BadParams("distance must be positive");
  return bound_constants().C_halfplane * dist_t0_U2 * std::exp(-mod_S);
}

// ---------------------------------------------------------------------------
// Diameters of the complementary components
// ---------------------------------------------------------------------------

namespace detail {

/// Andrew's monotone chain; returns the hull in counter-clockwise order.
inline std::vector<Complex> convex_hull(std::vector<Complex> p) {
  std::sort(p.begin(), p.end(), [](Complex a, Complex b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  if (p.size() < 3) return p;
  std::vector<Complex> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  return h;
}

inline double euclidean_diameter(const std::vector<Complex>& pts) {
  if (pts.empty()) throw EmptyInput("no points");
  const auto h = convex_hull(pts);
  double best = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = i + 1; j < h.size(); ++j) best = std::max(best, std::abs(h[i] - h[j]));
  return best;
}

inline Complex boundary_image(const NamedMap& map, Complex z) {
  return map.boundary ? (*map.boundary)(z) : map(z);
}

}  // namespace detail

struct ComplementDiameters {
  double diam_inner;  // component around ζ
  double diam_outer;  // component containing -ζ
  double min() const { return std::min(diam_inner, diam_outer); }
};

/// Boundary-sampled diameters of the two components of D \ f(T(ζ; r1, r2)).
/// Each boundary is the image of one side plus one arc of the unit circle.
inline ComplementDiameters complement_diameters(const NamedMap& map, const SemiannulusSpec& spec,
                                               std::size_t resolution = 4096) {
  spec.validate();
  if (!spec.is_disk()) throw DomainMismatch("complement diameters need a disk spec");
  if (map.domain != Domain::UnitDisk) throw DomainMismatch("map must act on the unit disk");
  if (spec.sector) throw UnsupportedSpec("sector-restricted spec");
  if (resolution < 16) throw BadParams("resolution must be >= 16");
  const std::size_t half = resolution / 2;
  auto component = [&](double rad, bool inner) {
    std::vector<Complex> pts;
    pts.reserve(resolution + 2);
    for (std::size_t k = 0; k <= half; ++k) {
      const double th = pi * static_cast<double>(k) / static_cast<double>(half);
      Complex z = halfplane_to_disk(std::polar(rad, th), spec.zeta);
      if (k == 0 || k == half) {
        z /= std::abs(z);
        pts.push_back(detail::boundary_image(map, z));
      } else {
        pts.push_back(map(z));
      }
    }
    // on ∂D, |L(ζ e^{iφ})| = |tan(φ/2)|
    const double phi_edge = 2.0 * std::atan(rad);
    for (std::size_t k = 0; k <= half; ++k) {
      const double u = static_cast<double>(k) / static_cast<double>(half);
      const double phi = inner ? -phi_edge + 2.0 * phi_edge * u : phi_edge + (2.0 * pi - 2.0 * phi_edge) * u;
      pts.push_back(detail::boundary_image(map, spec.zeta * std::polar(1.0, phi)));
    }
    return detail::euclidean_diameter(pts);
  };
  return {component(spec.r, true), component(spec.R, false)};
}

inline double complement_min_diameter(const NamedMap& map, const SemiannulusSpec& spec,
                                      std::size_t resolution = 4096) {
  return complement_diameters(map, spec, resolution).min();
}

// ---------------------------------------------------------------------------
// Random configurations
// ---------------------------------------------------------------------------

/// z -> e^{iφ}(z - a)/(1 - conj(a) z), |a| < 1.
inline NamedMap disk_automorphism(Complex a, double phi) {
  if (!(std::abs(a) < 1.0)) throw BadParams("automorphism needs |a| < 1");
  const Complex rot = std::polar(1.0, phi);
  NamedMap m;
  m.name = "disk_automorphism";
  m.domain = Domain::UnitDisk;
  m.params = {{"a_re", a.real()}, {"a_im", a.imag()}, {"phi", phi}};
  m.forward = [a, rot](Complex z) { return rot * (z - a) / (1.0 - std::conj(a) * z); };
  m.boundary = m.forward;
  m.mu_closed_form = [](Complex) { return Complex(0.0, 0.0); };
  return m;
}

struct DiskConfig {
  Complex zeta;
  double r1, r2;
  Complex a;
  double phi;
  SemiannulusSpec spec() const { return SemiannulusSpec::disk(zeta, r1, r2); }
  NamedMap map() const { return disk_automorphism(a, phi); }
};

inline std::vector<DiskConfig> random_disk_configs(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<DiskConfig> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    DiskConfig c;
    c.zeta = std::polar(1.0, 2.0 * pi * U(rng));
    c.r1 = std::exp(std::log(0.05) + U(rng) * std::log(20.0));  // [0.05, 1]
    c.r2 = c.r1 * std::exp(0.2 + 3.8 * U(rng));                 // mod in [0.2, 4]
    c.a = std::polar(0.7 * std::sqrt(U(rng)), 2.0 * pi * U(rng));
    c.phi = 2.0 * pi * U(rng);
    out.push_back(c);
  }
  return out;
}

struct DiameterFuzzRow {
  DiskConfig config;
  double mod_estimate;
  double lhs;  // min complement diameter
  double rhs;  // disk_diameter_bound(mod)
  double margin() const { return rhs - lhs; }
};

inline std::vector<DiameterFuzzRow> fuzz_disk_diameter(std::size_t count, std::uint64_t seed,
                                                       std::size_t mesh_n = 48,
                                                       std::size_t resolution = 4096,
                                                       unsigned threads = 1) {
  const auto configs = random_disk_configs(count, seed);
  std::vector<DiameterFuzzRow> rows(configs.size());
  parallel_for(configs.size(), threads, [&](std::size_t k) {
    const DiskConfig& c = configs[k];
    const NamedMap f = c.map();
    const ModulusEstimate e = discrete_modulus(mesh_region(f, c.spec(), mesh_n, mesh_n));
    const double lhs = complement_min_diameter(f, c.spec(), resolution);
    rows[k] = {c, e.value, lhs, disk_diameter_bound(e.value)};
  });
  return rows;
}

inline void write_fuzz_csv(std::ostream& os, const std::vector<DiameterFuzzRow>& rows) {
  os << "index,zeta_re,zeta_im,r1,r2,a_re,a_im,phi,mod_estimate,lhs,rhs,margin\n";
  char buf[512];
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  k, r.config.zeta.real(), r.config.zeta.imag(), r.config.r1, r.config.r2,
                  r.config.a.real(), r.config.a.imag(), r.config.phi, r.mod_estimate, r.lhs, r.rhs,
                  r.margin());
    os << buf;
  }
}

/// Star-shaped ring about `center` with smooth random boundary wobble.
struct RingConfig {
  Complex center;
  double inner, outer;
  double wobble_in, wobble_out;
  int freq_in, freq_out;
  double phase_in, phase_out;

  CurvedQuadMesh mesh(std::size_t n, std::size_t m) const {
    const RingConfig c = *this;
    return star_ring_mesh(
        center, [c](double th) { return c.inner * (1.0 + c.wobble_in * std::cos(c.freq_in * th + c.phase_in)); },
        [c](double th) { return c.outer * (1.0 + c.wobble_out * std::cos(c.freq_out * th + c.phase_out)); },
        n, m);
  }
};

/// Rings around z0 = 0: the inner curve stays outside |z| < inner/4.
inline std::vector<RingConfig> random_rings(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<RingConfig> out;
  for (std::size_t k = 0; k < count; ++k) {
    RingConfig c;
    c.inner = 0.5 + U(rng);
    c.center = std::polar(0.4 * c.inner * U(rng), 2.0 * pi * U(rng));
    c.outer = c.inner * std::exp(1.0 + 5.0 * U(rng));
    c.wobble_in = 0.2 * U(rng);
    c.wobble_out = 0.2 * U(rng);
    c.freq_in = 1 + static_cast<int>(4 * U(rng));
    c.freq_out = 1 + static_cast<int>(4 * U(rng));
    c.phase_in = 2.0 * pi * U(rng);
    c.phase_out = 2.0 * pi * U(rng);
    out.push_back(c);
  }
  return out;
}

}  // namespace qcb
