// Independent oracles shared by the test binaries. Nothing here calls the
// library's kernels or quadrature: integrands are written out in z directly
// and integrated on grids the engine never uses.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include "qcb/qcb.hpp"

namespace oracle {

using qcb::Complex;
inline constexpr double pi = 3.14159265358979323846;

// --- kernels, straight from their definitions -------------------------------

inline double D(Complex mu, Complex z, Complex z0) {
  const Complex w = z - z0;
  const double th = std::atan2(w.imag(), w.real());
  const Complex rot(std::cos(2 * th), -std::sin(2 * th));  // e^{-2iθ}
  const double num = std::norm(Complex(1.0, 0.0) - mu * rot);
  return num / (1.0 - std::norm(mu));
}

inline double squared_modulus(Complex mu, Complex z, double t) {
  return std::norm(mu) / ((1.0 - std::norm(mu)) * std::norm(z - t));
}

inline double real_quadratic(Complex mu, Complex z, double t) {
  const Complex w = z - t;
  return (mu / (w * w)).real() / (1.0 - std::norm(mu));
}

inline double d_plus_minus_one(Complex mu, Complex z, double t) {
  return (D(mu, z, Complex(t, 0)) - 1.0) / std::norm(z - t);
}

// --- brute-force sums ---------------------------------------------------------

/// Midpoint sum of f over {r < |z - t| < R, th0 < arg(z - t) < th1} with the
/// plain area element ρ dρ dθ (uniform in ρ, not in log ρ).
inline double riemann_annulus(const std::function<double(Complex)>& f, double t, double r, double R,
                              int n_rho, int n_theta, double th0 = 0.0, double th1 = pi) {
  const double hr = (R - r) / n_rho, ht = (th1 - th0) / n_theta;
  double total = 0.0;
  for (int i = 0; i < n_rho; ++i) {
    const double rho = r + (i + 0.5) * hr;
    double row = 0.0;
    for (int j = 0; j < n_theta; ++j) {
      const double th = th0 + (j + 0.5) * ht;
      row += f(Complex(t + rho * std::cos(th), rho * std::sin(th)));
    }
    total += row * rho;
  }
  return total * hr * ht;
}

/// Cartesian midpoint sum over the box [x0,x1]x[y0,y1].
inline double riemann_box(const std::function<double(Complex)>& f, double x0, double x1, double y0, double y1,
                          int nx, int ny) {
  const double hx = (x1 - x0) / nx, hy = (y1 - y0) / ny;
  double total = 0.0;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) total += f(Complex(x0 + (i + 0.5) * hx, y0 + (j + 0.5) * hy));
  return total * hx * hy;
}

// --- Gauss-Legendre -------------------------------------------------------------

inline constexpr std::array<double, 5> gl5_x = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                                0.5384693101056831, 0.9061798459386640};
inline constexpr std::array<double, 5> gl5_w = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                                0.4786286704993665, 0.2369268850561891};

/// Composite 5-point rule on [a, b].
template <typename F>
double gauss_legendre(F&& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    for (int k = 0; k < 5; ++k) total += gl5_w[k] * f(c + 0.5 * h * gl5_x[k]);
  }
  return 0.5 * h * total;
}

// --- ω-identity -------------------------------------------------------------------

struct WithError {
  double value;
  double error;
};

/// ∫_r^R ω(t; s) ds/s with u = log s; the error bar is the panel-doubling
/// difference plus the accumulated quadrature error estimates of ω.
inline WithError omega_log_integral(const qcb::BeltramiField& mu, double t, double r, double R,
                                    const qcb::QuadOptions& o, int panels) {
  auto pass = [&](int np) {
    const double a = std::log(r), b = std::log(R), h = (b - a) / np;
    double total = 0.0, err = 0.0;
    for (int p = 0; p < np; ++p) {
      const double c = a + (p + 0.5) * h;
      for (int k = 0; k < 5; ++k) {
        const auto q = qcb::holder_mean(mu, t, std::exp(c + 0.5 * h * gl5_x[k]), o);
        total += gl5_w[k] * q.value;
        err += gl5_w[k] * q.abs_error_estimate;
      }
    }
    return WithError{0.5 * h * total, 0.5 * h * err};
  };
  const WithError coarse = pass(panels / 2), fine = pass(panels);
  return {fine.value, fine.error + std::abs(fine.value - coarse.value)};
}

struct OmegaIdentity {
  double lhs, rhs, tolerance;
};

/// (Q - 1) log(R/r) against [ω(R) - ω(r)]/2 + ∫ ω ds/s.
inline OmegaIdentity omega_identity(const qcb::BeltramiField& mu, double t, double r, double R,
                                    const qcb::QuadOptions& o, int panels = 8) {
  const double L = std::log(R / r);
  const auto Q = qcb::q_modulus_ratio(mu, t, r, R, o);
  const auto wR = qcb::holder_mean(mu, t, R, o), wr = qcb::holder_mean(mu, t, r, o);
  const auto I = omega_log_integral(mu, t, r, R, o, panels);
  OmegaIdentity out;
  out.lhs = (Q.value - 1.0) * L;
  out.rhs = 0.5 * (wR.value - wr.value) + I.value;
  out.tolerance = Q.abs_error_estimate * L + 0.5 * (wR.abs_error_estimate + wr.abs_error_estimate) + I.error;
  return out;
}

// --- random sampling ----------------------------------------------------------------

struct Sampler {
  std::mt19937_64 rng;
  explicit Sampler(std::uint64_t seed) : rng(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  Complex in_disk(double radius) {
    const double rho = radius * std::sqrt(uniform(0.0, 1.0));
    return std::polar(rho, uniform(0.0, 2.0 * pi));
  }
  Complex in_upper(double box) { return {uniform(-box, box), uniform(1e-3, box)}; }
};

/// The radial-stretch coefficient ((K-1)/(K+1)) z/z̄, written independently.
inline Complex stretch_mu(double K, Complex z) { return (K - 1.0) / (K + 1.0) * z / std::conj(z); }

}  // namespace oracle
