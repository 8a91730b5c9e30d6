#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "wobblelab/potential.hpp"

using namespace wobblelab;

namespace {

SpacePtr lattice(int d, std::int64_t n) { return std::make_shared<const LatticeSpace>(d, n); }

std::size_t brute_force_edges(const Space& s, PointId x0, std::int64_t n, std::int64_t jump) {
  std::vector<PointId> v;
  for (PointId p : s.points()) {
    if (s.distance(x0, p) <= n) v.push_back(p);
  }
  std::size_t edges = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (s.distance(v[i], v[j]) <= jump) ++edges;
    }
  }
  return edges;
}

}  // namespace

TEST(RBallGraph, PathExamples) {
  auto z1 = lattice(1, 2);
  EXPECT_EQ(build_rball_graph(z1, z1->basepoint(), 2, 1).edge_count(), 4u);
  EXPECT_EQ(build_rball_graph(z1, z1->basepoint(), 2, 2).edge_count(), 7u);
  auto lonely = std::make_shared<const GraphSpace>(GraphSpec{{}, 0}, 1);
  const RBallGraph g = build_rball_graph(lonely, PointId{0}, 1, 1);
  EXPECT_EQ(g.vertex_count(), 1u);
  EXPECT_EQ(g.edge_count(), 0u);
}

TEST(RBallGraph, EdgesMatchPairEnumeration) {
  for (int d = 1; d <= 3; ++d) {
    for (std::int64_t jump = 1; jump <= 3; ++jump) {
      auto s = lattice(d, 5);
      const RBallGraph g = build_rball_graph(s, s->basepoint(), 5, jump);
      EXPECT_EQ(g.edge_count(), brute_force_edges(*s, s->basepoint(), 5, jump)) << d << " " << jump;
    }
  }
  auto tree = std::make_shared<const RootedTreeSpace>(3, 5);
  const RBallGraph g = build_rball_graph(tree, PointId{0}, 5, 2);
  EXPECT_EQ(g.edge_count(), brute_force_edges(*tree, PointId{0}, 5, 2));
}

TEST(RBallGraph, InteriorDegreeIsPuncturedBallSize) {
  auto s = lattice(2, 12);
  const RBallGraph g = build_rball_graph(s, s->basepoint(), 8, 2);
  std::size_t interior = 0;
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    std::set<std::uint32_t> nb(g.neighbors(i).begin(), g.neighbors(i).end());
    EXPECT_EQ(nb.size(), g.degree(i));  // no repeated edges
    EXPECT_FALSE(nb.count(static_cast<std::uint32_t>(i)));
    EXPECT_EQ(g.interior(i), g.level(i) + 2 <= 8);
    if (g.interior(i)) {
      ++interior;
      EXPECT_EQ(g.degree(i), s->ball(g.vertex(i), 2).size() - 1);
    }
  }
  EXPECT_GT(interior, 0u);
}

TEST(RBallGraph, RejectsBallsBeyondTheRegion) {
  auto s = lattice(2, 5);
  EXPECT_THROW(build_rball_graph(s, s->basepoint(), 6, 1), OutOfRegionError);
  EXPECT_THROW(build_rball_graph(s, s->basepoint(), 3, 0), Error);
}

TEST(DirichletEnergy, Examples) {
  auto z1 = std::static_pointer_cast<const LatticeSpace>(lattice(1, 2));
  const RBallGraph g = build_rball_graph(z1, z1->basepoint(), 2, 1);
  EXPECT_EQ(dirichlet_energy(g, std::vector<double>(5, 0.7)), 0.0);
  EXPECT_DOUBLE_EQ(dirichlet_energy(g, std::vector<double>{0, 0.5, 1, 0.5, 0}), 1.0);

  std::unordered_map<PointId, double> a{{z1->point(0), 1.0}, {z1->point(1), 0.0}};
  auto edge = std::make_shared<const GraphSpace>(GraphSpec{{{0, 1}}, 0}, 1);
  const RBallGraph e = build_rball_graph(edge, PointId{0}, 1, 1);
  EXPECT_EQ(dirichlet_energy(e, std::unordered_map<PointId, double>{{PointId{0}, 1.0}, {PointId{1}, 0.0}}), 1.0);
  EXPECT_THROW(dirichlet_energy(g, a), Error);
  EXPECT_THROW(dirichlet_energy(g, std::vector<double>(4, 0.0)), Error);
}

TEST(Capacity, SeriesResistanceOnTheLine) {
  for (std::int64_t n : {1, 2, 10, 100, 1000}) {
    auto z1 = lattice(1, n);
    const auto r = capacity_truncated(build_rball_graph(z1, z1->basepoint(), n, 1), z1->basepoint());
    EXPECT_NEAR(r.capacity, 2.0 / static_cast<double>(n), 1e-12) << n;
  }
}

TEST(Capacity, SymmetricTrees) {
  for (int b : {2, 3}) {
    for (int depth : {1, 5, 10}) {
      auto t = std::make_shared<const RootedTreeSpace>(b, depth);
      const auto r = capacity_truncated(build_rball_graph(t, PointId{0}, depth, 1), PointId{0});
      EXPECT_NEAR(r.capacity, oracle::rooted_tree_capacity(b, depth), 1e-10) << b << " " << depth;
    }
  }
  EXPECT_NEAR(oracle::rooted_tree_capacity(2, 10), 1.0 / (1.0 - std::pow(2.0, -10)), 1e-15);
  for (int depth : {3, 6, 9}) {
    auto f = std::make_shared<const FreeGroupSpace>(2, depth);
    const auto r = capacity_truncated(build_rball_graph(f, f->basepoint(), depth, 1), f->basepoint());
    EXPECT_NEAR(r.capacity, oracle::free_group_capacity(2, depth), 1e-10);
  }
}

TEST(Capacity, SingleResistor) {
  auto edge = std::make_shared<const GraphSpace>(GraphSpec{{{0, 1}}, 0}, 1);
  const auto r = capacity_truncated(build_rball_graph(edge, PointId{0}, 1, 1), PointId{0});
  EXPECT_DOUBLE_EQ(r.capacity, 1.0);
}

TEST(Capacity, MatchesDenseSolve) {
  struct Case {
    SpacePtr s;
    std::int64_t n, jump;
  };
  const std::vector<Case> cases = {{lattice(2, 6), 6, 1},
                                   {lattice(2, 6), 6, 2},
                                   {lattice(3, 3), 3, 1},
                                   {lattice(1, 9), 9, 3},
                                   {std::make_shared<const RootedTreeSpace>(2, 5), 5, 2},
                                   {std::make_shared<const FreeGroupSpace>(2, 3), 3, 2}};
  for (const auto& c : cases) {
    const auto r = capacity_truncated(build_rball_graph(c.s, c.s->basepoint(), c.n, c.jump), c.s->basepoint());
    EXPECT_NEAR(r.capacity, oracle::dense_capacity(*c.s, c.s->basepoint(), c.n, c.jump), 1e-9 * r.capacity)
        << c.s->describe() << " R=" << c.jump;
  }
}

TEST(Capacity, ProfileInvariants) {
  const std::vector<std::pair<SpacePtr, std::int64_t>> cases = {
      {lattice(2, 15), 1}, {lattice(3, 8), 2}, {std::make_shared<const RootedTreeSpace>(2, 8), 1},
      {std::make_shared<const FreeGroupSpace>(2, 5), 2}};
  for (const auto& [s, jump] : cases) {
    const std::int64_t n = s->radius();
    const RBallGraph g = build_rball_graph(s, s->basepoint(), n, jump);
    const auto r = capacity_truncated(g, s->basepoint());
    const auto& v = r.profile.values;
    EXPECT_EQ(v[*g.index_of(s->basepoint())], 1.0);
    for (std::size_t b : r.profile.boundary) EXPECT_EQ(v[b], 0.0);
    for (double x : v) {
      EXPECT_GE(x, -1e-12);
      EXPECT_LE(x, 1.0 + 1e-12);
    }
    EXPECT_LT(harmonic_residual(g, r.profile), 1e-9);
    EXPECT_NEAR(dirichlet_energy(g, v), r.capacity, 1e-9);
    EXPECT_LE(r.stats.relative_residual, 1e-10);
  }
}

TEST(Capacity, NonincreasingInRadius) {
  const std::vector<SpacePtr> spaces = {lattice(1, 40), lattice(2, 24), lattice(3, 10),
                                        std::make_shared<const RootedTreeSpace>(2, 10),
                                        std::make_shared<const FreeGroupSpace>(2, 6)};
  for (const auto& s : spaces) {
    for (std::int64_t jump = 1; jump <= 2; ++jump) {
      double previous = INFINITY;
      for (std::int64_t n = jump + 1; n <= s->radius(); ++n) {
        const double cap = capacity_truncated(build_rball_graph(s, s->basepoint(), n, jump), s->basepoint()).capacity;
        EXPECT_GE(cap, 0.0);
        EXPECT_LE(cap, previous + 1e-9) << s->describe() << " n=" << n << " R=" << jump;
        previous = cap;
      }
    }
  }
}

TEST(Capacity, SourceOnBoundaryIsRejected) {
  auto z1 = lattice(1, 3);
  auto line = std::static_pointer_cast<const LatticeSpace>(z1);
  const RBallGraph h = build_rball_graph(z1, z1->basepoint(), 3, 1);
  EXPECT_THROW(capacity_truncated(h, line->point(3)), Error);
  EXPECT_THROW(capacity_truncated(h, line->point(-3)), Error);
  EXPECT_NO_THROW(capacity_truncated(h, line->point(2)));
}

TEST(Capacity, FiniteComponentIsDegenerate) {
  auto path = std::make_shared<const GraphSpace>(GraphSpec{{{0, 1}, {1, 2}}, 0}, 10);
  const auto r = capacity_truncated(build_rball_graph(path, PointId{0}, 10, 1), PointId{0});
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.capacity, 0.0);
  EXPECT_EQ(r.profile.values, std::vector<double>(3, 1.0));
}

TEST(Capacity, SolverFailureIsSurfaced) {
  auto s = lattice(2, 30);
  CapacityOptions starved;
  starved.iteration_factor = 1e-3;
  EXPECT_THROW(capacity_truncated(build_rball_graph(s, s->basepoint(), 30, 1), s->basepoint(), starved), SolverError);
}

TEST(Classification, LineIsRecurrent) {
  const std::vector<std::int64_t> radii{10, 100, 1000};
  const auto report = capacity_profile(lattice(1, 1000), lattice(1, 1000)->basepoint(), 1, radii);
  ASSERT_EQ(report.cap_values.size(), 3u);
  EXPECT_NEAR(report.cap_values[0], 0.2, 1e-12);
  EXPECT_NEAR(report.cap_values[1], 0.02, 1e-12);
  EXPECT_NEAR(report.cap_values[2], 0.002, 1e-12);
  EXPECT_EQ(report.classification.label, Recurrence::recurrent);
  EXPECT_FALSE(report.classification.extrapolated_limit);
}

TEST(Classification, NeedsThreeRadii) {
  auto s = lattice(1, 20);
  const std::vector<std::int64_t> radii{10, 20};
  const auto report = capacity_profile(s, s->basepoint(), 1, radii);
  EXPECT_EQ(report.cap_values.size(), 2u);
  EXPECT_EQ(report.classification.label, Recurrence::inconclusive);
  EXPECT_FALSE(report.classification.note.empty());
  const std::vector<std::int64_t> unsorted{10, 5, 20};
  EXPECT_THROW(capacity_profile(s, s->basepoint(), 1, unsorted), Error);
}

TEST(Classification, SyntheticShapes) {
  const std::vector<std::int64_t> radii{10, 20, 40, 80, 160};
  std::vector<double> flat, logarithmic, power, stalled;
  for (auto n : radii) {
    const double x = static_cast<double>(n);
    flat.push_back(2.0 + 3.0 / x);
    logarithmic.push_back(1.0 / (0.5 * std::log(x) + 0.2));
    power.push_back(5.0 / x);
    stalled.push_back(1.0 / (0.01 * std::log(x) + 1.0));
  }
  auto c = classify_capacities(radii, flat, 1e-10);
  EXPECT_EQ(c.label, Recurrence::transient);
  EXPECT_EQ(c.preferred, DecayModel::limit);
  EXPECT_NEAR(*c.extrapolated_limit, 2.0, 1e-9);

  c = classify_capacities(radii, logarithmic, 1e-10);
  EXPECT_EQ(c.label, Recurrence::recurrent);
  EXPECT_EQ(c.preferred, DecayModel::logarithmic);

  c = classify_capacities(radii, power, 1e-10);
  EXPECT_EQ(c.label, Recurrence::recurrent);
  EXPECT_EQ(c.preferred, DecayModel::power);

  c = classify_capacities(radii, stalled, 1e-10);
  EXPECT_EQ(c.label, Recurrence::inconclusive);

  const std::vector<double> vanished{1.0, 1e-3, 0.0, 0.0, 0.0};
  EXPECT_EQ(classify_capacities(radii, vanished, 1e-10).label, Recurrence::recurrent);
}

TEST(Classification, LabelDoesNotDependOnJumpRadius) {
  struct Case {
    SpacePtr s;
    std::vector<std::int64_t> radii;
    Recurrence expected;
  };
  const std::vector<Case> cases = {
      {lattice(1, 1000), {10, 100, 1000}, Recurrence::recurrent},
      {lattice(2, 200), {2, 5, 10, 20, 50, 100, 200}, Recurrence::recurrent},
      {lattice(3, 40), {10, 20, 40}, Recurrence::transient},
      {std::make_shared<const RootedTreeSpace>(2, 20), {5, 10, 20}, Recurrence::transient},
      {std::make_shared<const FreeGroupSpace>(2, 12), {4, 8, 12}, Recurrence::transient}};
  for (const auto& c : cases) {
    for (std::int64_t jump : {1, 2}) {
      const auto report = capacity_profile(c.s, c.s->basepoint(), jump, c.radii);
      EXPECT_EQ(report.classification.label, c.expected) << c.s->describe() << " R=" << jump;
    }
  }
}

TEST(EscapeProbability, IsolatedPointNeverEscapes) {
  const GraphSpace lonely(GraphSpec{{}, 0}, 1);
  const auto e = mc_escape_probability(lonely, PointId{0}, 1, 100, 50, 0);
  EXPECT_EQ(e.estimate, 0.0);
  EXPECT_TRUE(e.isolated);
}

TEST(EscapeProbability, LineReturns) {
  const LatticeSpace z1(1, 100000);
  const auto short_walks = mc_escape_probability(z1, z1.basepoint(), 1, 100, 4000, 1);
  const auto long_walks = mc_escape_probability(z1, z1.basepoint(), 1, 10000, 4000, 1);
  EXPECT_LT(long_walks.estimate, 0.03);
  EXPECT_LT(long_walks.estimate, short_walks.estimate);
  EXPECT_EQ(long_walks.exits, 0);
}

TEST(EscapeProbability, BinaryTreeEscapesHalfTheTime) {
  const RootedTreeSpace tree(2, 40);
  const auto e = mc_escape_probability(tree, PointId{0}, 1, 2000, 20000, 5);
  EXPECT_NEAR(e.estimate, 0.5, 3.0 * std::sqrt(0.25 / 20000.0));
}

TEST(EscapeProbability, DeterministicAcrossThreadCounts) {
  const LatticeSpace z3(3, 200);
  const auto a = mc_escape_probability(z3, z3.basepoint(), 1, 500, 3000, 42, 1);
  const auto b = mc_escape_probability(z3, z3.basepoint(), 1, 500, 3000, 42, 3);
  const auto c = mc_escape_probability(z3, z3.basepoint(), 1, 500, 3000, 42, 7);
  EXPECT_EQ(a.escapes, b.escapes);
  EXPECT_EQ(a.escapes, c.escapes);
  EXPECT_EQ(a.estimate, c.estimate);
  const auto d = mc_escape_probability(z3, z3.basepoint(), 1, 500, 3000, 43, 1);
  EXPECT_NE(a.escapes, d.escapes);
}

TEST(EscapeProbability, AgreesWithConductance) {
  // transient unit-conductance graphs: escape = cap / deg(x0)
  struct Case {
    std::shared_ptr<const Space> walk_space;
    SpacePtr cap_space;
    std::vector<std::int64_t> radii;
    std::int64_t jump;
    double degree;
  };
  const std::vector<Case> cases = {
      {std::make_shared<const LatticeSpace>(3, 5000), lattice(3, 40), {10, 20, 40}, 1, 6.0},
      {std::make_shared<const FreeGroupSpace>(2, 30), std::make_shared<const FreeGroupSpace>(2, 12), {4, 8, 12}, 1, 4.0},
      {std::make_shared<const RootedTreeSpace>(3, 30), std::make_shared<const RootedTreeSpace>(3, 10), {4, 7, 10}, 1,
       3.0}};
  for (const auto& c : cases) {
    const auto report = capacity_profile(c.cap_space, c.cap_space->basepoint(), c.jump, c.radii);
    ASSERT_TRUE(report.classification.extrapolated_limit) << c.cap_space->describe();
    const double predicted = *report.classification.extrapolated_limit / c.degree;
    const auto e = mc_escape_probability(*c.walk_space, c.walk_space->basepoint(), c.jump, 10000, 20000, 11);
    const double se = std::sqrt(e.estimate * (1 - e.estimate) / 20000.0);
    EXPECT_NEAR(e.estimate, predicted, 3.0 * se + 0.005) << c.cap_space->describe();
  }
}

TEST(EscapeProbability, RejectsBadArguments) {
  const LatticeSpace z1(1, 10);
  EXPECT_THROW(mc_escape_probability(z1, z1.basepoint(), 1, 0, 10, 0), Error);
  EXPECT_THROW(mc_escape_probability(z1, z1.basepoint(), 1, 10, 0, 0), Error);
  EXPECT_THROW(mc_escape_probability(z1, z1.basepoint(), 0, 10, 10, 0), Error);
}
