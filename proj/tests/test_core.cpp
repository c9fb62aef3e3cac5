#include <gtest/gtest.h>

#include "support.hpp"

using namespace qcb;

namespace {

BeltramiField stretch(double K) { return gallery_map("radial_stretch", {{"K", K}}).field(); }

}  // namespace

TEST(Dilatation, ZeroFieldIsConformal) {
  const auto s = directional_dilatation(make_field("zero"), {0.3, 0.0}, {-1.0, 2.0});
  EXPECT_EQ(s.D_value, 1.0);
  EXPECT_EQ(s.D_neg_value, 1.0);
  EXPECT_EQ(s.K_value, 1.0);
}

TEST(Dilatation, RadialStretchAtOnePlusI) {
  const auto s = directional_dilatation(stretch(2.0), {0.0, 0.0}, {1.0, 1.0});
  EXPECT_NEAR(s.D_value, 0.5, 1e-15);
  EXPECT_NEAR(s.D_neg_value, 2.0, 1e-15);
  EXPECT_NEAR(s.K_value, 2.0, 1e-15);
  // brute force: the defining quotient with μ written out by hand
  const Complex mu = oracle::stretch_mu(2.0, {1.0, 1.0});
  EXPECT_NEAR(s.D_value, oracle::D(mu, {1.0, 1.0}, {0.0, 0.0}), 1e-15);
}

TEST(Dilatation, ConstantHalfAtI) {
  const auto s = directional_dilatation(make_field("constant", {{"re", 0.5}}), {0.0, 0.0}, {0.0, 1.0});
  EXPECT_NEAR(s.D_value, 2.25 / 0.75, 1e-14);
  EXPECT_NEAR(s.D_value, 3.0, 1e-14);
}

TEST(Dilatation, Errors) {
  const auto f = make_field("zero");
  EXPECT_THROW(directional_dilatation(f, {0.0, 0.0}, {1.0, -1.0}), DomainError);
  EXPECT_THROW(directional_dilatation(f, {1.0, 1.0}, {1.0, 1.0}), DegenerateBase);
  const auto d = make_field("zero", {{"disk", 1}});
  EXPECT_THROW(directional_dilatation(d, {0.0, 0.0}, {1.0, 0.5}), DomainError);
}

// Random (μ, z, z0) with |μ| <= 0.99 checked against the two algebraic
// relations between D_μ and D_{-μ}, the K bounds and rotation covariance.
TEST(DilatationProperty, IdentitiesOnRandomSamples) {
  oracle::Sampler S(20240611);
  for (int k = 0; k < 10000; ++k) {
    const Complex mu = S.in_disk(0.99);
    const Complex z = S.in_upper(5.0), z0(S.uniform(-5.0, 5.0), S.uniform(-1.0, 1.0));
    if (std::abs(z - z0) < 1e-6) continue;
    BeltramiField f(Domain::UpperHalfPlane, [mu](Complex) { return mu; });
    const auto s = directional_dilatation(f, z0, z);
    const Complex w = z - z0;
    const double den = 1.0 - std::norm(mu);

    const double sum_rhs = 2.0 * std::norm(mu) / den;
    const double sum_lhs = 0.5 * (s.D_value + s.D_neg_value) - 1.0;
    ASSERT_LE(std::abs(sum_lhs - sum_rhs), 1e-12 * std::max(1.0, std::abs(sum_rhs))) << k;

    const double diff_rhs = -2.0 * std::norm(w) * (mu / (w * w)).real() / den;
    const double diff_lhs = 0.5 * (s.D_value - s.D_neg_value);
    ASSERT_LE(std::abs(diff_lhs - diff_rhs), 1e-12 * std::max(1.0, std::abs(diff_rhs))) << k;

    const double K = (1.0 + std::abs(mu)) / (1.0 - std::abs(mu));
    ASSERT_NEAR(s.K_value, K, 1e-12 * K);
    ASSERT_LE(1.0 / K, s.D_value * (1 + 1e-13));
    ASSERT_LE(s.D_value, K * (1 + 1e-13));
    ASSERT_LE(1.0 / K, s.D_neg_value * (1 + 1e-13));
    ASSERT_LE(s.D_neg_value, K * (1 + 1e-13));
    ASSERT_NEAR(s.D_value, oracle::D(mu, z, z0), 1e-12 * K);

    const double phi = S.uniform(0.0, 2.0 * pi);
    const Complex e = std::polar(1.0, phi);
    const double rotated = directional_dilatation_value(mu * e * e, e * w);
    ASSERT_NEAR(rotated, s.D_value, 1e-12 * K);
  }
}

TEST(BeltramiField, ClippingBoundAndFlag) {
  const BeltramiField f(Domain::UpperHalfPlane, [](Complex z) { return Complex(z.real(), 0.0); }, "x", {}, 1e-3);
  const auto inside = f.evaluate({0.5, 1.0});
  EXPECT_FALSE(inside.clipped);
  EXPECT_EQ(inside.value, Complex(0.5, 0.0));
  for (double x : {0.9995, 1.0, 3.0, -40.0}) {
    const auto s = f.evaluate({x, 1.0});
    EXPECT_TRUE(s.clipped);
    EXPECT_LE(std::abs(s.value), 1.0 - 1e-3 + 1e-15);
    EXPECT_GT(s.value.real() * x, 0.0);  // direction preserved
  }
  EXPECT_EQ(f.with_clip(0.25).evaluate({0.9, 1.0}).value, Complex(0.75, 0.0));
}

TEST(BeltramiField, ClipKeepsDenominatorAwayFromZero) {
  const BeltramiField f(Domain::UpperHalfPlane, [](Complex) { return Complex(0.0, 1.0); });
  const auto s = directional_dilatation(f, {0.0, 0.0}, {1.0, 1.0});
  EXPECT_TRUE(s.clipped);
  EXPECT_TRUE(std::isfinite(s.D_value) && std::isfinite(s.K_value));
  const double eps = f.clip_epsilon();
  EXPECT_GE(1.0 - std::norm(s.mu), eps * (2.0 - eps) * (1.0 - 1e-6));
}

TEST(BeltramiField, DeterministicAndPure) {
  const auto f = gallery_map("shear").field();
  oracle::Sampler S(7);
  for (int k = 0; k < 200; ++k) {
    const Complex z = S.in_upper(1.0);
    EXPECT_EQ(f(z), f(z));
  }
}

TEST(BeltramiField, Validation) {
  auto ev = [](Complex) { return Complex(0.0, 0.0); };
  EXPECT_THROW(BeltramiField(Domain::UnitDisk, ev, "", {}, 0.0), BadParams);
  EXPECT_THROW(BeltramiField(Domain::UnitDisk, ev, "", {}, 0.5), BadParams);
  EXPECT_THROW(BeltramiField(Domain::UnitDisk, nullptr), BadParams);
  const BeltramiField nan(Domain::UnitDisk, [](Complex) { return Complex(std::nan(""), 0.0); });
  EXPECT_THROW(nan.evaluate({0.0, 0.0}), EvaluationError);
}

TEST(BeltramiField, NegatedTurnsDIntoDNeg) {
  const auto f = stretch(3.0);
  const auto a = directional_dilatation(f, {0.0, 0.0}, {0.2, 0.7});
  const auto b = directional_dilatation(f.negated(), {0.0, 0.0}, {0.2, 0.7});
  EXPECT_DOUBLE_EQ(a.D_value, b.D_neg_value);
  EXPECT_DOUBLE_EQ(a.D_neg_value, b.D_value);
}

TEST(Spherical, Examples) {
  EXPECT_DOUBLE_EQ(spherical_distance(Complex(0.0, 0.0), SpherePoint::infinity()), 1.0);
  EXPECT_NEAR(spherical_distance(Complex(0.0, 0.0), Complex(1.0, 0.0)), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(spherical_distance(Complex(2.0, -3.0), Complex(2.0, -3.0)), 0.0);
  EXPECT_EQ(spherical_distance(SpherePoint::infinity(), SpherePoint::infinity()), 0.0);
}

TEST(Spherical, MetricProperties) {
  oracle::Sampler S(99);
  auto pt = [&]() -> SpherePoint {
    if (S.uniform(0, 1) < 0.05) return SpherePoint::infinity();
    return S.in_disk(std::exp(S.uniform(-3, 6)));
  };
  for (int k = 0; k < 2000; ++k) {
    const SpherePoint a = pt(), b = pt(), c = pt();
    const double ab = spherical_distance(a, b);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0 + 1e-15);
    EXPECT_DOUBLE_EQ(ab, spherical_distance(b, a));
    EXPECT_LE(ab, spherical_distance(a, c) + spherical_distance(c, b) + 1e-12);
  }
}

TEST(Spherical, DiameterIsMaxPairwise) {
  const std::vector<SpherePoint> pts = {Complex(0, 0), Complex(1, 0), SpherePoint::infinity(), Complex(0, 0.5)};
  EXPECT_DOUBLE_EQ(spherical_diameter(pts), 1.0);
  const std::vector<SpherePoint> two = {Complex(0, 0), Complex(1, 0)};
  EXPECT_NEAR(spherical_diameter(two), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_THROW(spherical_diameter(std::vector<SpherePoint>{}), EmptyInput);
}

TEST(Semiannulus, Validation) {
  EXPECT_THROW(SemiannulusSpec::half_plane(0.0, 1.0, 1.0), InvalidSpec);
  EXPECT_THROW(SemiannulusSpec::half_plane(0.0, 0.0, 1.0), InvalidSpec);
  EXPECT_THROW(SemiannulusSpec::half_plane(0.0, 0.5, INFINITY), InvalidSpec);
  EXPECT_THROW(SemiannulusSpec::disk({0.5, 0.0}, 0.1, 1.0), InvalidSpec);
  EXPECT_THROW(SemiannulusSpec::half_plane(0.0, 0.1, 1.0).with_sector(1.0, 0.5), InvalidSpec);
  EXPECT_THROW(SemiannulusSpec::half_plane(0.0, 0.1, 1.0).with_sector(0.0, 4.0), InvalidSpec);
  EXPECT_NO_THROW(SemiannulusSpec::disk(std::polar(1.0, 0.3), 0.1, 1.0));
}

TEST(Semiannulus, InfinityConvention) {
  const auto s = SemiannulusSpec::at_infinity(2.0, 10.0);
  EXPECT_EQ(s.t, 0.0);
  EXPECT_DOUBLE_EQ(s.r, 0.1);
  EXPECT_DOUBLE_EQ(s.R, 0.5);
}

TEST(Transfer, RoundTripAndBoundary) {
  oracle::Sampler S(5);
  for (int k = 0; k < 500; ++k) {
    const Complex zeta = std::polar(1.0, S.uniform(0, 2 * pi));
    const Complex w = S.in_upper(4.0);
    const Complex z = halfplane_to_disk(w, zeta);
    ASSERT_LT(std::abs(z), 1.0);
    ASSERT_LT(std::abs(disk_to_halfplane(z, zeta) - w), 1e-10 * std::max(1.0, std::abs(w)));
  }
  EXPECT_LT(std::abs(halfplane_to_disk({0.0, 1e-300}, {0.0, 1.0}) - Complex(0.0, 1.0)), 1e-12);
}

// μ̂ = (μ∘φ) φ̄'/φ' with φ' by central differences.
TEST(Transfer, PullBackMatchesChainRule) {
  const auto mu = make_field("compact_bump", {{"cx", 0.5}, {"cy", 0.2}, {"radius", 0.4}, {"amp", 0.6}});
  const Complex zeta = std::polar(1.0, 0.4);
  const auto hat = pull_back_to_halfplane(mu, zeta);
  EXPECT_EQ(hat.domain(), Domain::UpperHalfPlane);
  oracle::Sampler S(11);
  for (int k = 0; k < 200; ++k) {
    const Complex w = S.in_upper(2.0);
    const double h = 1e-6 * std::max(1.0, std::abs(w));
    const Complex d = (halfplane_to_disk(w + h, zeta) - halfplane_to_disk(w - h, zeta)) / (2.0 * h);
    const Complex expect = mu(halfplane_to_disk(w, zeta)) * std::conj(d) / d;
    ASSERT_LT(std::abs(hat(w) - expect), 1e-7);
  }
}
