#pragma once

// Wobbles: bijections of a space that move finitely many points, each by a
// bounded distance. The norm |g|_w is the largest displacement.

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "wobblelab/potential.hpp"
#include "wobblelab/spaces.hpp"

namespace wobblelab {

class Wobble {
 public:
  using Pair = std::pair<PointId, PointId>;

  /// Identity on `space`.
  explicit Wobble(SpacePtr space);

  /// Product of disjoint transpositions; pairs must not share points.
  static Wobble from_transpositions(SpacePtr space, std::span<const Pair> swaps);

  /// Partial injective table x -> g(x). Open chains (a point of the image
  /// that is not in the domain) are closed by sending the chain's end back
  /// to its start, so a block translation becomes a bijection that moves the
  /// uncovered strip back across the block.
  static Wobble from_table(SpacePtr space, std::span<const Pair> table);

  const SpacePtr& space() const noexcept { return space_; }
  PointId apply(PointId x) const;
  PointId apply_inverse(PointId x) const;
  Wobble inverse() const;

  std::int64_t norm() const noexcept { return norm_; }
  /// (x, g(x)) for every moved x, sorted by x.
  const std::vector<Pair>& moved() const noexcept { return forward_; }
  std::vector<PointId> support() const;
  bool is_identity() const noexcept { return forward_.empty(); }
  bool is_involution() const;

  /// Largest displacement over the given points.
  std::int64_t displacement_on(std::span<const PointId> points) const;

  friend bool operator==(const Wobble& a, const Wobble& b) noexcept {
    return a.space_ == b.space_ && a.forward_ == b.forward_;
  }

 private:
  Wobble(SpacePtr space, std::vector<Pair> forward);

  SpacePtr space_;
  std::vector<Pair> forward_;  // sorted by source
  std::vector<Pair> backward_;  // (g(x), x) sorted by g(x)
  std::int64_t norm_ = 0;
};

/// g ∘ h, i.e. x -> g(h(x)). Both must act on the same space object.
Wobble compose(const Wobble& g, const Wobble& h);

/// x -> x + 1 on [-m, m] with m -> -m, on a one-dimensional lattice. Against
/// vectors that are neutral outside (-m, m) it acts exactly like the shift
/// of Z by one.
Wobble cyclic_shift(const SpacePtr& line, std::int64_t m);

/// j <-> j + 1 for every even j with j, j + 1 in [lo, hi], on a
/// one-dimensional lattice.
Wobble pair_swaps(const SpacePtr& line, std::int64_t lo, std::int64_t hi);

/// Translation of the given lattice points by `shift`, closed into a
/// bijection as in Wobble::from_table.
Wobble block_translation(const SpacePtr& lattice, std::span<const PointId> block,
                         std::span<const std::int64_t> shift);

/// Uniformly random permutation of a random subset of `pool`.
Wobble random_wobble(const SpacePtr& space, std::span<const PointId> pool, std::mt19937_64& rng);

/// Generator set whose Schreier graph contains the R-ball graph: vertices are
/// partitioned into classes at pairwise graph distance >= 3, every vertex
/// lists k neighbours (padded with itself), and s_{i,j} swaps x with its
/// j-th neighbour for every x in class i.
struct SchreierGenSet {
  std::vector<std::vector<std::size_t>> classes;       // vertex indices
  std::vector<std::size_t> color;                      // class of each vertex
  std::size_t k = 0;                                   // neighbours per vertex
  std::vector<std::vector<std::size_t>> neighbor_maps;  // per vertex, length k
  std::vector<Wobble> generators;                      // s_{i,j} at i * k + j
  std::size_t square_degree = 0;                       // max degree of G^2

  const Wobble& generator(std::size_t i, std::size_t j) const { return generators.at(i * k + j); }
};

SchreierGenSet schreier_generators(const RBallGraph& g);

struct EdgeWitness {
  std::size_t a = 0;  // vertex indices, a < b
  std::size_t b = 0;
  std::size_t witnesses = 0;
  bool interior = false;  // both endpoints interior
};

struct CoverageReport {
  std::size_t class_count = 0;
  std::size_t square_degree = 0;
  std::size_t k = 0;
  std::size_t generator_count = 0;
  std::int64_t max_generator_norm = 0;
  std::size_t interior_edges = 0;
  std::size_t boundary_edges = 0;
  std::size_t boundary_uncovered = 0;
  std::size_t min_interior_witnesses = 0;
  std::vector<EdgeWitness> edges;
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
};

/// Verifies involutions, displacement <= R, class separation, disjoint swap
/// pairs, the class-count bound and coverage (>= 2 witnesses) of every
/// interior edge.
CoverageReport schreier_coverage_check(const SchreierGenSet& s, const RBallGraph& g);

}  // namespace wobblelab
