#include "systolic/covering.hpp"
#include "systolic/isometry.hpp"
#include "systolic/manifold.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace systolic;

namespace {

const MetricSpec kSurface{LatitudeProfile::singular(), 2, 1.0};

SignedAffineIsometry sigma() { return klein_screw(Moduli{}); }
SignedAffineIsometry tau() { return klein_translation(Moduli{}); }

oracle::Affine to_oracle(const SignedAffineIsometry& f) { return {f.sign, f.shift}; }

SignedAffineIsometry random_isometry(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> s(0, 1);
  std::uniform_real_distribution<double> t(-5, 5);
  return SignedAffineIsometry::make(s(rng) ? 1 : -1, s(rng) ? 1 : -1, s(rng) ? 1 : -1, t(rng), t(rng), t(rng));
}

}  // namespace

TEST(Compose, Examples) {
  EXPECT_TRUE(compose(sigma(), sigma()).approx_equal(SignedAffineIsometry::translation(2 * kPi, 0), 1e-15));
  const auto g = SignedAffineIsometry::make(-1, 1, -1, 0.3, 0.2, 0.1);
  EXPECT_EQ(compose(SignedAffineIsometry::identity(), g), g);
  const auto r = klein_r(0.81);
  EXPECT_TRUE(compose(r, sigma()).approx_equal(compose(sigma(), r), 1e-15));
  EXPECT_TRUE(compose(r, sigma()).approx_equal(SignedAffineIsometry::make(1, -1, 1, 0.81 + kPi, 0.0), 1e-15));
}

TEST(Compose, GroupAxioms) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const auto f = random_isometry(rng), g = random_isometry(rng), h = random_isometry(rng);
    const ChartPoint p{0.3, -1.1, 2.2};
    const auto fg = compose(f, g);
    const ChartPoint a = fg(p), b = f(g(p));
    EXPECT_NEAR(a.u, b.u, 1e-14);
    EXPECT_NEAR(a.v, b.v, 1e-14);
    EXPECT_NEAR(a.z, b.z, 1e-14);
    EXPECT_TRUE(compose(compose(f, g), h).approx_equal(compose(f, compose(g, h)), 1e-13));
    EXPECT_TRUE(compose(f, inverse(f)).is_identity(1e-14));
    EXPECT_TRUE(compose(inverse(f), f).is_identity(1e-14));
    const auto o = oracle::compose(to_oracle(f), to_oracle(g));
    EXPECT_EQ(o.s, fg.sign);
    for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(o.t[i], fg.shift[i]);
  }
}

TEST(IsIsometry, Examples) {
  EXPECT_TRUE(is_isometry_of(klein_t(Moduli{}), kSurface));
  EXPECT_FALSE(is_isometry_of(SignedAffineIsometry::translation(0, 0.1), kSurface));
  for (double a : {0.0, 0.3, 1.7, -12.0}) EXPECT_TRUE(is_isometry_of(klein_r(a), kSurface));
  EXPECT_TRUE(is_isometry_of(SignedAffineIsometry::translation(0, 0.1), {LatitudeProfile::flat(), 2, 1.0}));
  // Analytic criterion matches the pointwise one.
  for (double tv : {kHalfPi, kPi, 0.1, 1.0, -kHalfPi, 3 * kHalfPi}) {
    const auto f = SignedAffineIsometry::make(1, -1, 1, 0.0, tv);
    bool pointwise = true;
    for (int i = 0; i < 400; ++i) {
      const double v = -3 + 0.015 * i;
      pointwise = pointwise && std::abs(oracle::psi(-v + tv) - oracle::psi(v)) < 1e-12;
    }
    EXPECT_EQ(is_isometry_of(f, kSurface), pointwise) << tv;
  }
}

TEST(Descends, Examples) {
  const DeckGroup g = deck_group(ManifoldSpec::singular_klein());
  EXPECT_TRUE(descends(klein_r(0.7338), g, kSurface));
  EXPECT_TRUE(descends(SignedAffineIsometry::make(1, -1, 1, 0, 0), g, kSurface));
  EXPECT_FALSE(descends(SignedAffineIsometry::translation(0, 0.1), g, kSurface));
  EXPECT_TRUE(descends(klein_t(Moduli{}), g, kSurface));
  EXPECT_TRUE(descends(klein_s1(), g, kSurface));
  EXPECT_TRUE(descends(klein_s2(Moduli{}), g, kSurface));
  // On a flat Klein bottle a v translation by a third of the period is an
  // isometry but conjugates sigma out of the group.
  const ManifoldSpec fk = ManifoldSpec::flat_klein(2.0, 3.0);
  EXPECT_FALSE(descends(SignedAffineIsometry::translation(0, 1.0), deck_group(fk), fk.metric()));
  EXPECT_TRUE(descends(SignedAffineIsometry::translation(0, 1.5), deck_group(fk), fk.metric()));
}

TEST(DeckGroup, Generators) {
  const auto b3 = deck_group(ManifoldSpec::singular_bieberbach(Topology::b3));
  ASSERT_EQ(b3.generators.size(), 3u);
  EXPECT_TRUE(b3.generators[0].approx_equal(SignedAffineIsometry::make(1, -1, 1, kPi, 0), 1e-15));
  EXPECT_TRUE(b3.generators[1].approx_equal(SignedAffineIsometry::translation(0, kPi), 1e-15));
  EXPECT_TRUE(b3.generators[2].approx_equal(SignedAffineIsometry::make(-1, 1, 1, 0, 0, kPi), 1e-15));

  const auto kc = deck_group(ManifoldSpec::klein_cross_circle(kPi, Geometry::singular));
  ASSERT_EQ(kc.generators.size(), 3u);
  EXPECT_TRUE(kc.generators[2].approx_equal(SignedAffineIsometry::translation(0, 0, kPi), 1e-15));

  const auto b1 = ManifoldSpec::singular_bieberbach(Topology::b1);
  EXPECT_NEAR(b1.moduli().alpha, kPi * (2 - std::sqrt(2.0)), 1e-15);
  EXPECT_NEAR(b1.moduli().d, kPi * std::sqrt(2 * std::sqrt(2.0) - 2), 1e-15);
  EXPECT_TRUE(deck_group(b1).generators[2].approx_equal(
      SignedAffineIsometry::make(1, 1, 1, b1.moduli().alpha, 0, b1.moduli().d), 1e-15));

  const auto b2 = ManifoldSpec::singular_bieberbach(Topology::b2);
  EXPECT_TRUE(deck_group(b2).generators[2].approx_equal(
      SignedAffineIsometry::make(1, 1, 1, b2.moduli().alpha, kHalfPi, b2.moduli().d), 1e-15));
  const auto b4 = deck_group(ManifoldSpec::singular_bieberbach(Topology::b4));
  EXPECT_TRUE(b4.generators[2].approx_equal(SignedAffineIsometry::make(-1, -1, 1, 0, kHalfPi, kPi), 1e-15));
}

TEST(DeckGroup, IsometriesActingFreely) {
  for (Topology t : {Topology::klein2, Topology::klein_cross_circle, Topology::b1, Topology::b2, Topology::b3,
                     Topology::b4}) {
    const ManifoldSpec m = t == Topology::klein2 ? ManifoldSpec::singular_klein()
                           : t == Topology::klein_cross_circle
                               ? ManifoldSpec::klein_cross_circle(kPi, Geometry::singular)
                               : ManifoldSpec::singular_bieberbach(t);
    const MetricSpec spec = m.metric();
    const DeckGroup g = deck_group(m);
    for (const auto& s : g.generators) EXPECT_TRUE(is_isometry_of(s, spec));
    std::vector<oracle::Affine> gens;
    for (const auto& s : g.generators) gens.push_back(to_oracle(s));
    // No non-identity word moves a grid point of the fundamental domain by less than 0.5.
    for (const auto& w : oracle::words(gens, 3)) {
      bool identity = w.s == std::array<int, 3>{1, 1, 1};
      for (int i = 0; i < 3; ++i) identity = identity && std::abs(w.t[i]) < 1e-9;
      if (identity) continue;
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
          for (int k = 0; k < (m.dimension() == 3 ? 4 : 1); ++k) {
            const double p[3] = {kPi * i / 8, kPi * j / 8, m.z_extent() * k / 4};
            double d2 = 0;
            for (int c = 0; c < m.dimension(); ++c) {
              const double x = w.s[c] * p[c] + w.t[c] - p[c];
              d2 += x * x;
            }
            EXPECT_GT(std::sqrt(d2), 0.5) << to_string(t);
          }
    }
  }
}

TEST(Enumerate, FlatSquareTorus) {
  const ManifoldSpec m = ManifoldSpec::flat_torus({{1, 0, 0}, {0, 1, 0}});
  const auto e = enumerate_elements(deck_group(m), m.metric(), 1.0);
  EXPECT_EQ(e.size(), 4u);
  EXPECT_TRUE(enumerate_elements(deck_group(m), m.metric(), 0.5).empty());
  EXPECT_THROW(enumerate_elements(deck_group(m), m.metric(), 0.0), InputError);
  EXPECT_THROW(enumerate_elements(deck_group(m), m.metric(), 1e4, {1000}), ResourceError);
}

TEST(Enumerate, FlatTorusMatchesLatticeBruteForce) {
  const std::vector<Vector3> basis{{1, 0, 0}, {0.31, 1.2, 0}};
  const ManifoldSpec m = ManifoldSpec::flat_torus(basis);
  for (double bound : {1.0, 1.5, 2.3}) {
    std::size_t expect = 0;
    for (int i = -10; i <= 10; ++i)
      for (int j = -10; j <= 10; ++j) {
        if (!i && !j) continue;
        const double x = i + 0.31 * j, y = 1.2 * j;
        if (std::hypot(x, y) <= bound) ++expect;
      }
    EXPECT_EQ(enumerate_elements(deck_group(m), m.metric(), bound).size(), expect) << bound;
  }
}

TEST(Enumerate, SingularKleinContainsBruteForceWords) {
  const ManifoldSpec m = ManifoldSpec::singular_klein();
  const DeckGroup g = deck_group(m);
  const double bound = kPi;
  const auto e = enumerate_elements(g, kSurface, bound);
  for (const auto& s : {sigma(), tau(), inverse(sigma()), inverse(tau())}) {
    bool found = false;
    for (const auto& f : e) found = found || f.approx_equal(s, 1e-12);
    EXPECT_TRUE(found);
  }
  // Every depth-4 word with lower bound <= the bound and reversed-v shift
  // inside the enumeration window is listed.
  const double w = std::sqrt(2.0) / 2;
  for (const auto& word : oracle::words({to_oracle(sigma()), to_oracle(tau())}, 4)) {
    const SignedAffineIsometry f = SignedAffineIsometry::make(word.s[0], word.s[1], word.s[2], word.t[0], word.t[1]);
    if (f.is_identity(1e-9)) continue;
    double lb2 = w * w * word.t[0] * word.t[0];
    if (word.s[1] > 0) lb2 += word.t[1] * word.t[1];
    if (std::sqrt(lb2) > bound) continue;
    if (word.s[1] < 0 && std::abs(word.t[1]) > 4 * kPi) continue;
    bool found = false;
    for (const auto& x : e) found = found || x.approx_equal(f, 1e-9);
    EXPECT_TRUE(found) << f;
  }
}

TEST(Enumerate, ClosedUnderInversionSortedUnique) {
  for (const ManifoldSpec& m : {ManifoldSpec::singular_klein(), ManifoldSpec::singular_bieberbach(Topology::b2),
                                ManifoldSpec::flat_torus({{1, 0, 0}, {0.5, 0.8, 0}, {0.2, 0.3, 0.9}})}) {
    const auto e = enumerate_elements(deck_group(m), m.metric(), 2 * kPi);
    ASSERT_FALSE(e.empty());
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (i) {
        EXPECT_TRUE(lexicographic_less(e[i - 1], e[i]));
        EXPECT_FALSE(e[i - 1].approx_equal(e[i], 1e-9));
      }
      const auto inv = inverse(e[i]);
      bool found = false;
      for (const auto& f : e) found = found || f.approx_equal(inv, 1e-9);
      EXPECT_TRUE(found) << e[i];
    }
  }
}

TEST(Membership, Contains) {
  const DeckGroup g = deck_group(ManifoldSpec::singular_klein());
  EXPECT_TRUE(contains(g, compose(sigma(), compose(tau(), sigma()))));
  EXPECT_TRUE(contains(g, SignedAffineIsometry::translation(4 * kPi, -3 * kPi)));
  EXPECT_FALSE(contains(g, SignedAffineIsometry::translation(kPi, 0)));
  EXPECT_FALSE(contains(g, klein_t(Moduli{})));
}

TEST(Displacement, Examples) {
  const ManifoldSpec k = ManifoldSpec::singular_klein();
  EXPECT_EQ(displacement(SignedAffineIsometry::identity(), kSurface, k).value, 0.0);
  const auto ds = displacement(sigma(), kSurface, k);
  EXPECT_NEAR(ds.value, kPi, 1e-9);
  // The argmin realises the value.
  EXPECT_NEAR(singular_surface_distance_exact(ds.argmin.u, ds.argmin.v, sigma()(ds.argmin).u, sigma()(ds.argmin).v),
              kPi, 1e-9);
  for (double alpha : {0.3, 0.7338, 1.2}) {
    const auto f = compose(klein_r(alpha), klein_t(Moduli{}));
    EXPECT_NEAR(displacement(f, kSurface, k).value, oracle::b2_displacement(alpha), 1e-3) << alpha;
    // The corner branch needs the quotient; on the cover only the band loop is available.
    EXPECT_NEAR(cover_displacement(f, kSurface).value, std::acos((std::cos(alpha) - 1) / 2), 1e-9) << alpha;
  }
}

TEST(Displacement, ArgminAgainstGraphOracle) {
  // Minimise the Dijkstra distance over base latitudes for r_alpha o T.
  const double alpha = 0.7338;
  double best = INFINITY;
  for (int j = 0; j <= 16; ++j) {
    const double v = -kQuarterPi + kHalfPi * j / 16;
    best = std::min(best, oracle::graph_distance(0, v, alpha, v + kHalfPi, kPi / 96));
  }
  EXPECT_NEAR(best, oracle::b2_displacement(alpha), 2e-2 * best);
  EXPECT_GE(best, oracle::b2_displacement(alpha) * (1 - 1e-3));
}

TEST(Displacement, ConjugationInvariance) {
  const ManifoldSpec m = ManifoldSpec::singular_bieberbach(Topology::b2);
  const MetricSpec spec = m.metric();
  const DeckGroup g = deck_group(m);
  const auto elems = enumerate_elements(g, spec, 5.0);
  for (std::size_t i = 0; i < elems.size(); i += std::max<std::size_t>(1, elems.size() / 12)) {
    const double d = cover_displacement(elems[i], spec).value;
    for (const auto& c : g.generators) {
      EXPECT_NEAR(cover_displacement(conjugate(c, elems[i]), spec).value, d, 1e-6) << elems[i];
      EXPECT_NEAR(cover_displacement(conjugate(inverse(c), elems[i]), spec).value, d, 1e-6) << elems[i];
    }
  }
}

TEST(Displacement, FlatClosedForm) {
  const MetricSpec flat{LatitudeProfile::flat(), 3, 1.0};
  EXPECT_NEAR(cover_displacement(SignedAffineIsometry::translation(3, 4, 12), flat).value, 13, 1e-14);
  EXPECT_NEAR(cover_displacement(SignedAffineIsometry::make(1, -1, 1, 2.0, 7.0, 0.0), flat).value, 2.0, 1e-14);
  EXPECT_NEAR(cover_displacement(SignedAffineIsometry::make(1, -1, -1, 2.0, 7.0, 1.0), flat).value, 2.0, 1e-14);
}

TEST(Displacement, NormalizerCosetMinimum) {
  // T descends to the Klein bottle; its shortest loop joins p to some g.T(p).
  const ManifoldSpec k = ManifoldSpec::singular_klein();
  const auto f = klein_t(Moduli{});
  const auto d = displacement(f, kSurface, k);
  EXPECT_LE(d.value, cover_displacement(f, kSurface).value + 1e-12);
  EXPECT_GT(d.value, 0.0);
}
