#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace qcb;

TEST(Constants, ClosedForms) {
  const auto& c = bound_constants();
  EXPECT_DOUBLE_EQ(c.C_disk, 4.0 * std::exp(pi / 2.0));
  EXPECT_NEAR(c.C_disk, 19.241907, 5e-6);
  EXPECT_NEAR(c.C_halfplane, 23.140693, 1e-6);
  EXPECT_DOUBLE_EQ(c.separation_loss, pi);
  EXPECT_EQ(&bound_constants(), &c);
}

TEST(DiskDiameterBound, Examples) {
  EXPECT_NEAR(disk_diameter_bound(0.0), 19.241907, 5e-6);
  EXPECT_NEAR(disk_diameter_bound(10.0), 0.129651, 1e-6);
  EXPECT_NEAR(disk_diameter_bound(pi), 4.0, 1e-14);
  EXPECT_THROW(disk_diameter_bound(-1.0), BadParams);
}

TEST(HyperbolicSharpBound, Examples) {
  const auto b = hyperbolic_sharp_bound(2.0, {0, 1});
  // 4r/(1+r^2) at r = 1/e is the distance between the images of ±i
  const double r = std::exp(-1.0);
  EXPECT_NEAR(b.bound, 4 * r / (1 + r * r), 1e-15);
  EXPECT_NEAR(b.bound, 1.296065, 1e-3);
  EXPECT_NEAR(b.witness.r, r, 1e-15);
  EXPECT_NEAR(b.witness.R, 1 / r, 1e-14);
  EXPECT_EQ(b.witness.zeta, Complex(0, 1));
  EXPECT_NEAR(canonical_modulus(b.witness), 2.0, 1e-14);
  EXPECT_NEAR(hyperbolic_sharp_bound(1e-9).bound, 2.0, 1e-12);
  EXPECT_NEAR(hyperbolic_sharp_bound(2.0 * std::acosh(2.0)).bound, 1.0, 1e-14);
  EXPECT_THROW(hyperbolic_sharp_bound(0.0), BadParams);
}

TEST(HalfplaneOffsetBound, Examples) {
  EXPECT_NEAR(halfplane_offset_bound(2 * pi, 1.0), 23.140693 * std::exp(-2 * pi), 1e-9);
  EXPECT_NEAR(halfplane_offset_bound(2 * pi, 1.0), 0.043214, 1e-6);
  // round case: r <= e^π R e^{-log(R/r)} with slack e^π
  const double rr = 0.1, RR = 100.0;
  EXPECT_NEAR(halfplane_offset_bound(std::log(RR / rr), RR) / rr, std::exp(pi), 1e-10);
  EXPECT_THROW(halfplane_offset_bound(pi, 1.0), HypothesisViolated);
  EXPECT_THROW(halfplane_offset_bound(4.0, 0.0), BadParams);
}

TEST(BoundProperty, StrictlyDecreasing) {
  oracle::Sampler S(3);
  for (int k = 0; k < 1000; ++k) {
    const double a = S.uniform(pi + 1e-3, 30.0), b = a + S.uniform(1e-3, 5.0);
    EXPECT_GT(disk_diameter_bound(a), disk_diameter_bound(b));
    EXPECT_GT(hyperbolic_sharp_bound(a).bound, hyperbolic_sharp_bound(b).bound);
    EXPECT_GT(halfplane_offset_bound(a, 1.3), halfplane_offset_bound(b, 1.3));
  }
}

TEST(ConvexHull, Diameter) {
  std::vector<Complex> sq = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.2, 0.7}};
  EXPECT_EQ(detail::convex_hull(sq).size(), 4u);
  EXPECT_NEAR(detail::euclidean_diameter(sq), std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(detail::euclidean_diameter({{3, 4}}), 0.0);
  EXPECT_THROW(detail::euclidean_diameter({}), EmptyInput);
  // brute force over random clouds
  oracle::Sampler S(9);
  for (int k = 0; k < 50; ++k) {
    std::vector<Complex> p(60);
    for (auto& z : p) z = S.in_disk(2.0);
    double best = 0;
    for (auto& a : p)
      for (auto& b : p) best = std::max(best, std::abs(a - b));
    EXPECT_DOUBLE_EQ(detail::euclidean_diameter(p), best);
  }
}

TEST(ComplementDiameters, WitnessFamily) {
  const auto id = identity_map(Domain::UnitDisk);
  for (double r : {0.2, std::exp(-1.0), 0.5}) {
    const auto spec = SemiannulusSpec::disk(std::polar(1.0, 0.3), r, 1 / r);
    const double target = 2.0 / std::cosh(0.5 * canonical_modulus(spec));
    EXPECT_NEAR(complement_min_diameter(id, spec), target, 1e-3) << r;
    EXPECT_LE(complement_min_diameter(id, spec), target + 1e-12) << r;
  }
  const auto w = SemiannulusSpec::disk({1, 0}, std::exp(-1.0), std::exp(1.0));
  EXPECT_NEAR(complement_min_diameter(id, w), 1.296065, 1e-3);
}

TEST(ComplementDiameters, ConvergesFromBelow) {
  const auto id = identity_map(Domain::UnitDisk);
  const auto spec = SemiannulusSpec::disk({0, -1}, 0.3, 1.0 / 0.3);
  double prev = 0;
  for (std::size_t res : {16, 64, 256, 1024, 4096}) {
    const double d = complement_min_diameter(id, spec, res);
    EXPECT_GE(d, prev - 1e-15);
    prev = d;
  }
}

TEST(ComplementDiameters, TrivialAndRotationInvariant) {
  const auto id = identity_map(Domain::UnitDisk);
  const auto t = SemiannulusSpec::disk({1, 0}, 0.5, 0.6);
  const double d = complement_min_diameter(id, t);
  EXPECT_LT(d, 2.0);
  EXPECT_LE(d, disk_diameter_bound(std::log(1.2)));
  const auto base = SemiannulusSpec::disk({1, 0}, 0.4, 2.5);
  const double d0 = complement_min_diameter(id, base);
  for (double phi : {0.5, 2.0, -1.3}) {
    EXPECT_NEAR(complement_min_diameter(disk_automorphism({0, 0}, phi), base), d0, 1e-12);
    EXPECT_NEAR(complement_min_diameter(id, SemiannulusSpec::disk(std::polar(1.0, phi), 0.4, 2.5)), d0, 1e-12);
  }
}

TEST(ComplementDiameters, Errors) {
  const auto id = identity_map(Domain::UnitDisk);
  EXPECT_THROW(complement_min_diameter(id, SemiannulusSpec::half_plane(0, 1, 2)), DomainMismatch);
  EXPECT_THROW(complement_min_diameter(identity_map(), SemiannulusSpec::disk({1, 0}, 0.5, 2)), DomainMismatch);
  EXPECT_THROW(complement_min_diameter(id, SemiannulusSpec::disk({1, 0}, 0.5, 2), 8), BadParams);
  EXPECT_THROW(complement_min_diameter(id, SemiannulusSpec::disk({1, 0}, 0.5, 2).with_sector(0.5, 1)),
               UnsupportedSpec);
}

TEST(DiskAutomorphism, IsAnAutomorphism) {
  const auto f = disk_automorphism({0.3, 0.5}, 1.2);
  EXPECT_NEAR(std::abs(f(Complex(0.3, 0.5))), 0.0, 1e-15);
  oracle::Sampler S(5);
  for (int k = 0; k < 100; ++k) EXPECT_NEAR(std::abs(f(std::polar(1.0, S.uniform(0, 2 * pi)))), 1.0, 1e-14);
  EXPECT_THROW(disk_automorphism({1, 0}, 0), BadParams);
}

TEST(Fuzz, DiskDiameterBoundHoldsOnHundredConfigs) {
  const auto rows = fuzz_disk_diameter(100, 20240601, 48, 4096);
  ASSERT_EQ(rows.size(), 100u);
  double worst = INFINITY;
  for (const auto& r : rows) {
    EXPECT_LE(r.lhs, r.rhs + 1e-3);
    EXPECT_NEAR(r.mod_estimate, canonical_modulus(r.config.spec()), 0.02 * canonical_modulus(r.config.spec()));
    worst = std::min(worst, r.margin());
  }
  EXPECT_GT(worst, 0.0);
}

TEST(Fuzz, SeededAndThreadIndependent) {
  const auto a = fuzz_disk_diameter(6, 11, 16, 256, 1), b = fuzz_disk_diameter(6, 11, 16, 256, 3);
  std::ostringstream sa, sb;
  write_fuzz_csv(sa, a);
  write_fuzz_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_NE(random_disk_configs(1, 1)[0].r1, random_disk_configs(1, 2)[0].r1);
  const std::string csv = sa.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "index,zeta_re,zeta_im,r1,r2,a_re,a_im,phi,mod_estimate,lhs,rhs,margin");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}

TEST(Fuzz, ConfigRanges) {
  for (const auto& c : random_disk_configs(500, 4)) {
    EXPECT_NEAR(std::abs(c.zeta), 1.0, 1e-15);
    EXPECT_GE(c.r1, 0.05 - 1e-15);
    EXPECT_LE(c.r1, 1.0 + 1e-15);
    EXPECT_GE(std::log(c.r2 / c.r1), 0.2 - 1e-12);
    EXPECT_LE(std::log(c.r2 / c.r1), 4.0 + 1e-12);
    EXPECT_LT(std::abs(c.a), 0.7);
  }
}

// The best round annulus about an inner point loses at most π of modulus.
TEST(RoundSubannulus, SeparationLossOnRandomRings) {
  for (const auto& c : random_rings(20, 77)) {
    const auto B = c.mesh(64, 256);
    const auto a = max_round_subannulus(B, {0, 0});
    const double mod = discrete_modulus(B).value;
    EXPECT_GE(a.log_ratio(), mod - pi - 1e-2);
    EXPECT_LE(a.log_ratio(), mod + 1e-2);  // a round subannulus cannot beat B
  }
}
