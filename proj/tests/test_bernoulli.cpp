#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "wobblelab/bernoulli.hpp"
#include "wobblelab/random.hpp"

using namespace wobblelab;

namespace {

std::shared_ptr<const LatticeSpace> line(std::int64_t n) { return std::make_shared<const LatticeSpace>(1, n); }

/// Random factors on m distinct points of the pool; roughly one factor in
/// eight has a zero entry.
ProductVector random_vector(const SpacePtr& s, std::vector<PointId> pool, std::size_t m, std::mt19937_64& rng) {
  std::shuffle(pool.begin(), pool.end(), rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ProductVector::Entry> entries;
  for (std::size_t i = 0; i < m; ++i) {
    Factor f{unit(rng), unit(rng)};
    const auto roll = uniform_below(rng, 16);
    if (roll == 0) f.u = 0.0;
    if (roll == 1) f.v = 0.0;
    entries.push_back({pool[i], f});
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return ProductVector(s, std::move(entries));
}

/// Uniform permutation of the given points.
Wobble permutation_of(const SpacePtr& s, const std::vector<PointId>& pts, std::mt19937_64& rng) {
  std::vector<PointId> image = pts;
  std::shuffle(image.begin(), image.end(), rng);
  std::vector<Wobble::Pair> table;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i] != image[i]) table.emplace_back(pts[i], image[i]);
  }
  return Wobble::from_table(s, table);
}

FiniteProfile random_profile(const SpacePtr& s, PointId x0, const std::vector<PointId>& pool, std::size_t m,
                             std::mt19937_64& rng) {
  std::vector<PointId> pts = pool;
  std::shuffle(pts.begin(), pts.end(), rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<FiniteProfile::Entry> values{{x0, 1.0}};
  for (PointId p : pts) {
    if (values.size() == m) break;
    if (p != x0) values.push_back({p, unit(rng)});
  }
  std::sort(values.begin(), values.end());
  return FiniteProfile(s, x0, std::move(values));
}

}  // namespace

TEST(JmProfile, Factors) {
  auto z = line(2000);
  const ProductVector f1 = jm_profile(z, 1.0);
  EXPECT_NEAR(f1.factor(z->point(0)).v, std::exp(-1.0), 1e-15);
  EXPECT_NEAR(f1.factor(z->point(0)).v, 0.3679, 5e-5);
  EXPECT_EQ(f1.factor(z->point(0)).u, 1.0);
  const ProductVector f = jm_profile(z, 10.0);
  for (std::int64_t j = 1; j <= 60; ++j) {
    EXPECT_EQ(f.factor(z->point(j)), f.factor(z->point(-j)));
    EXPECT_GT(f.factor(z->point(j)).v, f.factor(z->point(j - 1)).v);
  }
  EXPECT_GT(f.factor(z->point(200)).v, 0.99);
  EXPECT_THROW(jm_profile(z, 0.0), Error);
  EXPECT_THROW(jm_profile(line(10), 10.0), OutOfRegionError);
  EXPECT_THROW(jm_profile(std::make_shared<const LatticeSpace>(2, 10), 1.0), Error);
}

TEST(JmProfile, WindowTailIsCertified) {
  auto z = line(6000);
  for (double n : {1.0, 5.0, 10.0, 100.0}) {
    for (std::int64_t w : {0, 3, 20, 100}) {
      const ProductVector narrow = jm_profile(z, n, w);
      const ProductVector wide = jm_profile(z, n, w + 2000);
      // the bound is tight to first order once the factors are near neutral,
      // so allow for rounding in the two long sums being subtracted
      const double rounding = 1e-15 * static_cast<double>(wide.factors().size()) * (1.0 + std::abs(wide.log_norm_squared()));
      EXPECT_LE(std::abs(wide.log_norm_squared() - narrow.log_norm_squared()), narrow.tail_bound() + rounding)
          << n << " " << w;
    }
    const auto [w, bound] = jm_window(n);
    EXPECT_LT(bound, 1e-12);
    EXPECT_EQ(jm_profile(z, n).factors().size(), static_cast<std::size_t>(2 * w + 1));
  }
}

TEST(JmProfile, CylinderMass) {
  auto z = line(1000);
  for (double n : {1.0, 5.0, 10.0}) {
    EXPECT_NEAR(cylinder_mass(jm_profile(z, n), z->point(0)), 1.0 / (1.0 + std::exp(-2.0 * n)), 1e-12);
  }
  EXPECT_NEAR(cylinder_mass(jm_profile(z, 1.0), z->point(0)), 0.88080, 5e-6);
}

TEST(JmProfile, ShiftDefectDecreases) {
  auto z = line(50000);
  const Wobble shift = cyclic_shift(z, jm_window(1000.0).first + 1);
  double previous = INFINITY;
  double previous_inner = 0.0;
  for (double n : {1.0, 10.0, 100.0, 1000.0}) {
    const ProductVector f = jm_profile(z, n);
    const double inner = normalized_inner(f, shift);
    const double d = defect(f, shift);
    EXPECT_GT(inner, 0.0);
    EXPECT_LT(inner, 1.0);
    EXPECT_GT(inner, previous_inner);
    EXPECT_LT(d, previous) << n;
    previous = d;
    previous_inner = inner;
  }
}

TEST(ProductVectors, IdentityAndCylinderExamples) {
  auto z = line(10);
  const ProductVector f(z, {{z->point(0), {1.0, 0.5}}, {z->point(3), {0.2, 0.9}}});
  EXPECT_EQ(normalized_inner(f, Wobble(z)), 1.0);
  EXPECT_EQ(defect(f, Wobble(z)), 0.0);
  EXPECT_EQ(cylinder_mass(ProductVector(z, {{z->point(0), {1.0, 0.0}}}), z->point(0)), 1.0);
  EXPECT_EQ(cylinder_mass(ProductVector(z, {{z->point(0), {1.0, 1.0}}}), z->point(0)), 0.5);
  EXPECT_EQ(cylinder_mass(f, z->point(5)), 0.5);
}

TEST(ProductVectors, ThreeCoordinateCycle) {
  auto z = line(10);
  const ProductVector f(z, {{z->point(0), {1.0, 0.5}}, {z->point(1), {1.0, 1.0 / 3.0}}, {z->point(2), {1.0, 1.0}}});
  const std::vector<Wobble::Pair> cycle{
      {z->point(0), z->point(1)}, {z->point(1), z->point(2)}, {z->point(2), z->point(0)}};
  const Wobble g = Wobble::from_table(z, cycle);
  const double expected = oracle::expanded_inner(f, g);
  EXPECT_NEAR(normalized_inner(f, g), expected, 1e-12);
  EXPECT_LT(expected, 1.0);
}

TEST(ProductVectors, ConcentratedCoordinateSwappedWithNeutralOne) {
  auto z = line(10);
  const ProductVector f(z, {{z->point(0), {1.0, 0.0}}});
  const Wobble::Pair p{z->point(0), z->point(4)};
  const Wobble g = Wobble::from_transpositions(z, std::span(&p, 1));
  EXPECT_NEAR(normalized_inner(f, g), oracle::expanded_inner(f, g), 1e-15);
  EXPECT_NEAR(normalized_inner(f, g), 0.5, 1e-15);
  EXPECT_NEAR(defect(f, g), 1.0, 1e-15);
}

TEST(ProductVectors, MatchFullExpansion) {
  auto z2 = std::make_shared<const LatticeSpace>(2, 4);
  const auto pool = z2->points();
  std::mt19937_64 rng(99);
  int failures = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t m = 1 + uniform_below(rng, 12);
    const ProductVector f = random_vector(z2, pool, m, rng);
    std::vector<PointId> coords;
    for (const auto& [x, _] : f.factors()) coords.push_back(x);
    // half the trials permute only the listed coordinates, half also pull in
    // neutral ones
    if (trial % 2 == 1) {
      for (PointId p : pool) {
        if (coords.size() >= 12) break;
        if (std::find(coords.begin(), coords.end(), p) == coords.end() && uniform_below(rng, 8) == 0) coords.push_back(p);
      }
    }
    const Wobble g = permutation_of(z2, coords, rng);
    const double got = normalized_inner(f, g);
    const double expected = oracle::expanded_inner(f, g);
    if (std::abs(got - expected) > 1e-10) ++failures;
    EXPECT_LE(got, 1.0 + 1e-12);
    EXPECT_GE(got, 0.0);
  }
  EXPECT_EQ(failures, 0);
}

TEST(ProductVectors, ValidatesInput) {
  auto z = line(5);
  EXPECT_THROW(ProductVector(z, {{z->point(0), {0.0, 0.0}}}), Error);
  EXPECT_THROW(ProductVector(z, {{z->point(0), {-1.0, 1.0}}}), Error);
  EXPECT_THROW(ProductVector(z, {{z->point(0), {1.0, 1.0}}, {z->point(0), {1.0, 0.5}}}), Error);
  EXPECT_THROW(ProductVector(z, {{PointId{77}, {1.0, 1.0}}}), OutOfRegionError);
  const ProductVector f(z, {{z->point(0), {1.0, 1.0}}});
  EXPECT_THROW(normalized_inner(f, Wobble(line(5))), Error);
}

TEST(Ozawa, Examples) {
  auto z = line(10);
  const PointId x0 = z->point(0);
  const FiniteProfile a(z, x0, {{x0, 1.0}, {z->point(1), 0.4}});
  const OzawaRatio id = ozawa_log_ratio(a, Wobble(z));
  EXPECT_EQ(id.lhs, 0.0);
  EXPECT_EQ(id.rhs, 0.0);

  const FiniteProfile indicator(z, x0, {{x0, 1.0}});
  const Wobble::Pair p{x0, z->point(5)};
  const Wobble g = Wobble::from_transpositions(z, std::span(&p, 1));
  const OzawaRatio r = ozawa_log_ratio(indicator, g);
  EXPECT_NEAR(r.lhs, std::log(2.0), 1e-15);
  EXPECT_NEAR(r.rhs, 1.0, 1e-15);

  const ProductVector v = profile_to_product(indicator);
  ASSERT_EQ(v.factors().size(), 1u);
  EXPECT_EQ(v.factor(x0), (Factor{1.0, 1.0}));
}

TEST(Ozawa, InequalityAndDuality) {
  auto z2 = std::make_shared<const LatticeSpace>(2, 6);
  const auto pool = z2->ball(z2->basepoint(), 4).ids();
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 1000; ++trial) {
    const FiniteProfile a = random_profile(z2, z2->basepoint(), pool, 2 + uniform_below(rng, 19), rng);
    const Wobble g = random_wobble(z2, pool, rng);
    const OzawaRatio r = ozawa_log_ratio(a, g);
    ASSERT_LE(r.lhs, r.rhs + 1e-12);
    ASSERT_GE(r.lhs, -1e-12);
    ASSERT_NEAR(std::exp(-r.lhs), normalized_inner(profile_to_product(a), g), 1e-12);
  }
}

TEST(Ozawa, MatchesSubsetExpansion) {
  auto z = line(12);
  const auto pool = z->ball(z->basepoint(), 6).ids();
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const FiniteProfile a = random_profile(z, z->basepoint(), pool, 3, rng);
    const Wobble g = random_wobble(z, pool, rng);
    EXPECT_NEAR(std::exp(-ozawa_log_ratio(a, g).lhs), oracle::expanded_ozawa_ratio(a, g), 1e-12);
    EXPECT_NEAR(oracle::expanded_ozawa_ratio(a, g), oracle::expanded_inner(profile_to_product(a), g), 1e-12);
  }
}

TEST(Ozawa, ValidatesProfiles) {
  auto z = line(5);
  const PointId x0 = z->point(0);
  EXPECT_THROW(FiniteProfile(z, x0, {{x0, 0.5}}), Error);
  EXPECT_THROW(FiniteProfile(z, x0, {{x0, 1.0}, {z->point(1), 1.5}}), Error);
  EXPECT_THROW(FiniteProfile(z, x0, {{x0, 1.0}, {PointId{99}, 0.5}}), OutOfRegionError);
  const FiniteProfile a(z, x0, {{x0, 1.0}, {z->point(2), 0.0}});
  EXPECT_EQ(a.values().size(), 1u);
  EXPECT_EQ(a(z->point(2)), 0.0);
}
