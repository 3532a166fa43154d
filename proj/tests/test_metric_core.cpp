#include "systolic/isometry.hpp"
#include "systolic/manifold.hpp"
#include "systolic/metric.hpp"
#include "systolic/profile.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace systolic;

namespace {

const LatitudeProfile kSing = LatitudeProfile::singular();

MetricSpec singular3() { return {kSing, 3, 1.0}; }

}  // namespace

TEST(Psi, Values) {
  EXPECT_DOUBLE_EQ(psi(kSing, 0.0), 1.0);
  EXPECT_NEAR(psi(kSing, kQuarterPi), std::sqrt(2.0) / 2, 1e-15);
  EXPECT_NEAR(psi(kSing, kHalfPi), 1.0, 1e-15);
  EXPECT_NEAR(psi(kSing, 3 * kPi / 8), std::cos(kPi / 8), 1e-15);
  EXPECT_NEAR(psi(kSing, 3 * kPi / 8), 0.9238795, 1e-7);
  EXPECT_DOUBLE_EQ(psi(LatitudeProfile::flat(2.5), 0.3), 2.5);
}

TEST(Psi, PeriodicEvenAndBounded) {
  for (int i = -2000; i <= 2000; ++i) {
    const double v = 0.0037 * i;
    const double p = psi(kSing, v);
    EXPECT_NEAR(p, psi(kSing, -v), 1e-14);
    EXPECT_NEAR(p, psi(kSing, v + kHalfPi), 1e-14);
    EXPECT_NEAR(p, oracle::psi(v), 1e-14);
    EXPECT_GE(p, std::sqrt(2.0) / 2 - 1e-15);
    EXPECT_LE(p, 1.0);
  }
  EXPECT_NEAR(psi(kSing, kQuarterPi + 5 * kHalfPi), std::sqrt(2.0) / 2, 1e-14);
  EXPECT_NEAR(psi(kSing, 7 * kHalfPi), 1.0, 1e-14);
}

TEST(Psi, RejectsNonFinite) {
  EXPECT_THROW(psi(kSing, std::nan("")), DomainError);
  EXPECT_THROW(psi(kSing, INFINITY), DomainError);
  EXPECT_THROW(LatitudeProfile::flat(0.0), InputError);
}

TEST(MetricTensor, Examples) {
  auto t = metric_tensor(singular3(), {0.2, 0.0, 0.1});
  ASSERT_EQ(t.size(), 3u);
  EXPECT_NEAR(t[0], 1.0, 1e-15);
  EXPECT_EQ(t[1], 1.0);
  EXPECT_EQ(t[2], 1.0);
  t = metric_tensor(singular3(), {0.0, kQuarterPi, 0.0});
  EXPECT_NEAR(t[0], 0.5, 1e-15);
  t = metric_tensor({LatitudeProfile::flat(), 3, 1.0}, {5, 6, 7});
  EXPECT_EQ(t, (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(metric_tensor({kSing, 2, 1.0}, {0, 0, 0}).size(), 2u);
}

TEST(CurveLength, Segments) {
  const MetricSpec s = singular3();
  EXPECT_NEAR(curve_length(s, std::vector<ChartPoint>{{0.4, 0.1, 0.2}, {0.4, 1.1, 0.2}}), 1.0, 1e-12);
  EXPECT_NEAR(curve_length(s, std::vector<ChartPoint>{{0, 0, 0}, {kPi, 0, 0}}), kPi, 1e-12);
  EXPECT_NEAR(curve_length(s, std::vector<ChartPoint>{{0, kQuarterPi, 0}, {kPi, kQuarterPi, 0}}),
              kPi * std::sqrt(2.0) / 2, 1e-12);
  EXPECT_NEAR(curve_length(s, std::vector<ChartPoint>{{0, kQuarterPi, 0}, {kPi, kQuarterPi, 0}}), 2.2214415, 1e-7);
  EXPECT_EQ(curve_length(s, std::vector<ChartPoint>{{1, 2, 3}}), 0.0);
}

TEST(CurveLength, SegmentAgainstSimpsonOracle) {
  const MetricSpec s{kSing, 2, 1.0};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-3, 3);
  for (int k = 0; k < 50; ++k) {
    const ChartPoint p{U(rng), U(rng), 0}, q{U(rng), U(rng), 0};
    // Simpson on the kinked integrand converges slowly; many panels.
    EXPECT_NEAR(curve_length(s, std::vector<ChartPoint>{p, q}), oracle::segment(p.u, p.v, q.u, q.v, 20000), 1e-7);
  }
}

TEST(CurveLength, IsometryInvariance) {
  const MetricSpec s = singular3();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-2, 2);
  const std::vector<SignedAffineIsometry> isos{
      SignedAffineIsometry::make(1, -1, 1, kPi, 0.0),    SignedAffineIsometry::translation(0.0, kPi),
      SignedAffineIsometry::translation(0.0, kHalfPi),   SignedAffineIsometry::make(-1, 1, 1, 0.0, 0.0),
      SignedAffineIsometry::make(-1, -1, 1, 0.0, kHalfPi), SignedAffineIsometry::make(1, -1, -1, 0.37, -kPi, 2.0)};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ChartPoint> poly;
    for (int i = 0; i < 8; ++i) poly.push_back({U(rng), U(rng), U(rng)});
    const double L = curve_length(s, poly);
    for (const auto& f : isos) {
      ASSERT_TRUE(is_isometry_of(f, s));
      std::vector<ChartPoint> img;
      for (const auto& p : poly) img.push_back(f(p));
      EXPECT_NEAR(curve_length(s, img) / L, 1.0, 1e-10);
    }
  }
}

TEST(CurveLength, AdditiveAndRefinementInvariant) {
  const MetricSpec s = singular3();
  const std::vector<ChartPoint> poly{{0, -1, 0}, {1.3, 0.9, 0.5}, {2.0, 2.4, -0.3}};
  const double L = curve_length(s, poly);
  const double L1 = curve_length(s, std::vector<ChartPoint>{poly[0], poly[1]});
  const double L2 = curve_length(s, std::vector<ChartPoint>{poly[1], poly[2]});
  EXPECT_NEAR(L, L1 + L2, 1e-12);
  std::vector<ChartPoint> fine;
  for (std::size_t i = 0; i + 1 < poly.size(); ++i)
    for (int k = 0; k < 37; ++k) {
      const double t = k / 37.0;
      fine.push_back({poly[i].u + t * (poly[i + 1].u - poly[i].u), poly[i].v + t * (poly[i + 1].v - poly[i].v),
                      poly[i].z + t * (poly[i + 1].z - poly[i].z)});
    }
  fine.push_back(poly.back());
  EXPECT_NEAR(curve_length(s, fine), L, 1e-8);
}

TEST(Volume, Examples) {
  const double area = 2 * std::sqrt(2.0) * kPi;
  EXPECT_NEAR(volume(ManifoldSpec::singular_klein()), area, 1e-10);
  EXPECT_NEAR(volume(ManifoldSpec::singular_klein()), 4 * kPi * std::sin(kQuarterPi), 1e-10);
  EXPECT_NEAR(volume(ManifoldSpec::singular_klein()), 8.8857659, 1e-7);
  EXPECT_NEAR(volume(ManifoldSpec::klein_cross_circle(kPi, Geometry::singular)), area * kPi, 1e-9);
  EXPECT_NEAR(volume(ManifoldSpec::klein_cross_circle(kPi, Geometry::singular)), 27.915457, 1e-6);
  EXPECT_NEAR(volume(ManifoldSpec::flat_torus({{1, 0, 0}, {0, 1, 0}})), 1.0, 1e-15);
  const double d1 = kPi * std::sqrt(2 * std::sqrt(2.0) - 2);
  EXPECT_NEAR(volume(ManifoldSpec::singular_bieberbach(Topology::b1)), area * d1, 1e-9);
  EXPECT_NEAR(volume(ManifoldSpec::singular_bieberbach(Topology::b1)), 25.408, 1e-3);
  EXPECT_NEAR(volume(ManifoldSpec::flat_klein(2.0, 3.0)), 3.0, 1e-15);
}

TEST(Volume, ScaleAndOracleQuadrature) {
  const ManifoldSpec k = ManifoldSpec::singular_klein();
  EXPECT_NEAR(volume(k.scaled(1.7)), 1.7 * 1.7 * volume(k), 1e-10);
  boost::math::quadrature::tanh_sinh<double> ts;
  const double ref = kPi * ts.integrate([](double v) { return oracle::psi(v); }, 0.0, kQuarterPi) * 4;
  EXPECT_NEAR(volume(k), ref, 1e-10);
}

TEST(ManifoldSpec, Validation) {
  EXPECT_THROW(ManifoldSpec::flat_torus({{1, 0, 0}, {2, 0, 0}}), InputError);
  EXPECT_THROW(ManifoldSpec::flat_torus({{1, 0, 0}}), InputError);
  EXPECT_THROW(ManifoldSpec::singular_torus(1.0, 1.0), InputError);
  EXPECT_THROW(ManifoldSpec::klein_cross_circle(0.0, Geometry::singular), InputError);
  EXPECT_THROW(ManifoldSpec::flat_bieberbach(Topology::b1, 2, 1, 0.1, -1), InputError);
  EXPECT_THROW(ManifoldSpec::singular_bieberbach(Topology::klein2), InputError);
  EXPECT_THROW(ManifoldSpec::singular_klein().scaled(0.0), InputError);
}
