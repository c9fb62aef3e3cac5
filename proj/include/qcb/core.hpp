/// \file
/// Domain types shared by every qcb module: Beltrami fields with clipping,
/// semiannulus descriptions, directional dilatation and the chordal metric.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qcb {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define QCB_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                   \
   public:                                                      \
    explicit Name(const std::string& msg) : Error(#Name ": " + msg) {} \
  };

QCB_DEFINE_ERROR(DomainError)
QCB_DEFINE_ERROR(DegenerateBase)
QCB_DEFINE_ERROR(EmptyInput)
QCB_DEFINE_ERROR(InvalidSpec)
QCB_DEFINE_ERROR(DomainMismatch)
QCB_DEFINE_ERROR(UnsupportedSpec)
QCB_DEFINE_ERROR(EvaluationError)
QCB_DEFINE_ERROR(DegenerateCell)
QCB_DEFINE_ERROR(UnboundedImage)
QCB_DEFINE_ERROR(SolveFailure)
QCB_DEFINE_ERROR(NotSeparating)
QCB_DEFINE_ERROR(HypothesisViolated)
QCB_DEFINE_ERROR(UnknownName)
QCB_DEFINE_ERROR(BadParams)
QCB_DEFINE_ERROR(StencilOutOfDomain)
QCB_DEFINE_ERROR(GridTooCoarse)
QCB_DEFINE_ERROR(FormatError)

#undef QCB_DEFINE_ERROR

using Params = std::map<std::string, double>;

// ---------------------------------------------------------------------------
// Beltrami fields
// ---------------------------------------------------------------------------

enum class Domain { UpperHalfPlane, UnitDisk };

inline const char* to_string(Domain d) {
  return d == Domain::UpperHalfPlane ? "upper_half_plane" : "unit_disk";
}

inline bool in_domain(Domain d, Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return d == Domain::UpperHalfPlane ? z.imag() > 0.0 : std::abs(z) < 1.0;
}

struct MuSample {
  Complex value;
  bool clipped = false;
};

/// A Beltrami coefficient: a pure evaluator plus the clipping policy applied
/// to every value it produces. After clipping |mu| <= 1 - clip_epsilon.
class BeltramiField {
 public:
  using Evaluator = std::function<Complex(Complex)>;

  BeltramiField(Domain domain, Evaluator evaluator, std::string label = {},
                Params params = {}, double clip_epsilon = 1e-9)
      : domain_(domain),
        evaluator_(std::move(evaluator)),
        clip_epsilon_(clip_epsilon),
        label_(std::move(label)),
        params_(std::move(params)) {
    if (!(clip_epsilon_ > 0.0 && clip_epsilon_ < 0.5))
      throw BadParams("clip_epsilon must lie in (0, 0.5)");
    if (!evaluator_) throw BadParams("empty evaluator");
  }

  Domain domain() const { return domain_; }
  double clip_epsilon() const { return clip_epsilon_; }
  const std::string& label() const { return label_; }
  const Params& params() const { return params_; }

  bool contains(Complex z) const { return in_domain(domain_, z); }

  /// Raw value followed by radial clipping onto |mu| <= 1 - clip_epsilon.
  MuSample evaluate(Complex z) const {
    const Complex raw = evaluator_(z);
    if (!std::isfinite(raw.real()) || !std::isfinite(raw.imag()))
      throw EvaluationError(label_ + ": non-finite coefficient");
    const double cap = 1.0 - clip_epsilon_;
    const double a = std::abs(raw);
    if (a > cap) return {raw * (cap / a), true};
    return {raw, false};
  }

  Complex operator()(Complex z) const { return evaluate(z).value; }

  /// Same evaluator with a different clipping threshold.
  BeltramiField with_clip(double clip_epsilon) const {
    return BeltramiField(domain_, evaluator_, label_, params_, clip_epsilon);
  }

  /// The field -mu (used for D_{-mu}).
  BeltramiField negated() const {
    auto ev = evaluator_;
    return BeltramiField(
        domain_, [ev](Complex z) { return -ev(z); }, "-" + label_, params_,
        clip_epsilon_);
  }

 private:
  Domain domain_;
  Evaluator evaluator_;
  double clip_epsilon_;
  std::string label_;
  Params params_;
};

// ---------------------------------------------------------------------------
// Dilatation algebra
// ---------------------------------------------------------------------------

struct DilatationSample {
  Complex z;
  Complex z0;
  Complex mu;
  double K_value;
  double D_value;
  double D_neg_value;
  bool clipped = false;
};

/// K = (1+|mu|)/(1-|mu|).
inline double max_dilatation(Complex mu) {
  const double a = std::abs(mu);
  return (1.0 + a) / (1.0 - a);
}

/// |1 - mu * conj(w)/w|^2 / (1 - |mu|^2) for a direction w = z - z0 != 0.
inline double directional_dilatation_value(Complex mu, Complex w) {
  const Complex rot = std::conj(w) / w;
  return std::norm(1.0 - mu * rot) / (1.0 - std::norm(mu));
}

inline DilatationSample directional_dilatation(const BeltramiField& mu,
                                               Complex z0, Complex z) {
  if (!mu.contains(z)) throw DomainError("point outside the field's domain");
  const Complex w = z - z0;
  if (w == Complex(0.0, 0.0)) throw DegenerateBase("z coincides with z0");
  const MuSample s = mu.evaluate(z);
  DilatationSample out;
  out.z = z;
  out.z0 = z0;
  out.mu = s.value;
  out.clipped = s.clipped;
  out.K_value = max_dilatation(s.value);
  out.D_value = directional_dilatation_value(s.value, w);
  out.D_neg_value = directional_dilatation_value(-s.value, w);
  return out;
}

// ---------------------------------------------------------------------------
// Semiannuli
// ---------------------------------------------------------------------------

struct Sector {
  double theta1 = 0.0;
  double theta2 = pi;
};

/// A(t; r, R) ∩ H, or T(zeta; r1, r2) ⊂ D, optionally restricted in angle.
/// For the disk variant the angle refers to arg w in the half-plane picture
/// w = i(zeta - z)/(zeta + z).
struct SemiannulusSpec {
  enum class Kind { HalfPlane, Disk };

  Kind kind = Kind::HalfPlane;
  double t = 0.0;
  Complex zeta{1.0, 0.0};
  double r = 0.0;
  double R = 0.0;
  std::optional<Sector> sector;

  static SemiannulusSpec half_plane(double t, double r, double R) {
    SemiannulusSpec s;
    s.kind = Kind::HalfPlane;
    s.t = t;
    s.r = r;
    s.R = R;
    s.validate();
    return s;
  }

  /// A(∞; r, R) is A(0; 1/R, 1/r).
  static SemiannulusSpec at_infinity(double r, double R) {
    if (!(r > 0.0 && r < R && std::isfinite(R)))
      throw InvalidSpec("need 0 < r < R < inf");
    return half_plane(0.0, 1.0 / R, 1.0 / r);
  }

  static SemiannulusSpec disk(Complex zeta, double r1, double r2) {
    SemiannulusSpec s;
    s.kind = Kind::Disk;
    s.zeta = zeta;
    s.r = r1;
    s.R = r2;
    s.validate();
    return s;
  }

  SemiannulusSpec with_sector(double theta1, double theta2) const {
    SemiannulusSpec s = *this;
    s.sector = Sector{theta1, theta2};
    s.validate();
    return s;
  }

  bool is_disk() const { return kind == Kind::Disk; }
  double theta_lo() const { return sector ? sector->theta1 : 0.0; }
  double theta_hi() const { return sector ? sector->theta2 : pi; }
  double log_ratio() const { return std::log(R / r); }

  void validate() const {
    if (!(r > 0.0 && r < R && std::isfinite(R)))
      throw InvalidSpec("need 0 < r < R < inf");
    if (kind == Kind::Disk && std::abs(std::abs(zeta) - 1.0) > 1e-12)
      throw InvalidSpec("zeta must have unit modulus");
    if (sector && !(sector->theta1 >= 0.0 && sector->theta1 < sector->theta2 &&
                    sector->theta2 <= pi))
      throw InvalidSpec("sector must satisfy 0 <= theta1 < theta2 <= pi");
  }
};

// ---------------------------------------------------------------------------
// Disk / half-plane transfer
// ---------------------------------------------------------------------------

/// L(z) = i(zeta - z)/(zeta + z): D -> H with L(zeta) = 0, |L| = |(z-zeta)/(z+zeta)|.
inline Complex disk_to_halfplane(Complex z, Complex zeta) {
  return Complex(0.0, 1.0) * (zeta - z) / (zeta + z);
}

/// M = L^{-1}(w) = zeta (i - w)/(i + w).
inline Complex halfplane_to_disk(Complex w, Complex zeta) {
  const Complex i(0.0, 1.0);
  return zeta * (i - w) / (i + w);
}

/// M'(w) = -2i zeta / (i + w)^2.
inline Complex halfplane_to_disk_derivative(Complex w, Complex zeta) {
  const Complex i(0.0, 1.0);
  const Complex d = i + w;
  return -2.0 * i * zeta / (d * d);
}

/// mu_hat = (mu ∘ M) conj(M')/M', the coefficient of L ∘ f ∘ M on H.
inline BeltramiField pull_back_to_halfplane(const BeltramiField& mu, Complex zeta) {
  if (mu.domain() != Domain::UnitDisk)
    throw DomainMismatch("pull-back needs a disk field");
  BeltramiField src = mu;
  return BeltramiField(
      Domain::UpperHalfPlane,
      [src, zeta](Complex w) {
        const Complex d = halfplane_to_disk_derivative(w, zeta);
        return src(halfplane_to_disk(w, zeta)) * std::conj(d) / d;
      },
      mu.label() + "@pullback", mu.params(), mu.clip_epsilon());
}

// ---------------------------------------------------------------------------
// Chordal metric
// ---------------------------------------------------------------------------

/// A point of the Riemann sphere.
struct SpherePoint {
  Complex z{0.0, 0.0};
  bool infinite = false;

  SpherePoint() = default;
  SpherePoint(Complex w) : z(w) {}  // NOLINT: implicit by intent
  static SpherePoint infinity() {
    SpherePoint p;
    p.infinite = true;
    return p;
  }
};

inline double spherical_distance(const SpherePoint& a, const SpherePoint& b) {
  if (a.infinite && b.infinite) return 0.0;
  if (a.infinite) return 1.0 / std::sqrt(1.0 + std::norm(b.z));
  if (b.infinite) return 1.0 / std::sqrt(1.0 + std::norm(a.z));
  return std::abs(a.z - b.z) /
         std::sqrt((1.0 + std::norm(a.z)) * (1.0 + std::norm(b.z)));
}

inline double spherical_diameter(std::span<const SpherePoint> points) {
  if (points.empty()) throw EmptyInput("no points");
  double best = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      best = std::max(best, spherical_distance(points[i], points[j]));
  return best;
}

}  // namespace qcb
