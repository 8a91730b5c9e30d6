#pragma once

// Bounded-geometry metric spaces over a finite working region B(x0, n_max).
//
// Every space hands out opaque integer point ids. Lattices and trees compute
// ids arithmetically, so a large working region costs nothing until someone
// enumerates it; explicit graphs keep their adjacency in memory.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace wobblelab {

enum class PointId : std::int64_t {};

constexpr std::int64_t raw(PointId p) noexcept { return static_cast<std::int64_t>(p); }

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfRegionError : public Error {
 public:
  using Error::Error;
};

struct BallPoint {
  PointId id;
  std::int64_t distance;
};

/// Closed ball restricted to the working region. `outside` counts the points
/// of the true ball that the truncation cut away.
struct Ball {
  std::vector<BallPoint> points;  // sorted by id, contains the center
  std::uint64_t outside = 0;

  bool clipped() const noexcept { return outside > 0; }
  std::size_t size() const noexcept { return points.size(); }
  bool contains(PointId p) const noexcept;
  std::vector<PointId> ids() const;
};

enum class TrialOutcome { escaped, returned, exited, isolated };

/// One random-walk trial engine for a fixed start point and jump radius.
/// Steps are uniform on the punctured ball B(x, R) \ {x}.
class Walker {
 public:
  virtual ~Walker() = default;
  virtual TrialOutcome run(std::int64_t horizon, std::mt19937_64& rng) const = 0;
};

enum class SpaceKind { lattice, rooted_tree, free_group, graph, product };

class Space {
 public:
  virtual ~Space() = default;

  virtual SpaceKind kind() const noexcept = 0;
  virtual std::string describe() const = 0;

  std::int64_t radius() const noexcept { return radius_; }
  PointId basepoint() const noexcept { return basepoint_; }

  virtual bool contains(PointId x) const noexcept = 0;
  virtual std::uint64_t size() const = 0;
  /// All region points, sorted by id.
  virtual std::vector<PointId> points() const;

  virtual std::int64_t distance(PointId x, PointId y) const = 0;
  virtual Ball ball(PointId x, std::int64_t r) const = 0;
  /// sup over the whole space of |B(x, r)|.
  virtual std::uint64_t ball_bound(std::int64_t r) const = 0;

  virtual std::string label(PointId x) const = 0;
  virtual PointId parse_label(std::string_view text) const = 0;

  virtual std::unique_ptr<Walker> walker(PointId start, std::int64_t jump) const;

  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 protected:
  Space(std::int64_t radius, PointId basepoint) : radius_(radius), basepoint_(basepoint) {}
  void require(PointId x) const;

  std::int64_t radius_;
  PointId basepoint_;
  std::vector<std::string> warnings_;
};

using SpacePtr = std::shared_ptr<const Space>;

enum class LatticeMetric { l1, linf };

/// Z^d with the l1 (word) metric, or l-infinity on request. The region is the
/// metric ball of radius n_max around the origin.
class LatticeSpace final : public Space {
 public:
  LatticeSpace(int dimension, std::int64_t radius, LatticeMetric metric = LatticeMetric::l1);

  SpaceKind kind() const noexcept override { return SpaceKind::lattice; }
  std::string describe() const override;
  bool contains(PointId x) const noexcept override;
  std::uint64_t size() const override;
  std::int64_t distance(PointId x, PointId y) const override;
  Ball ball(PointId x, std::int64_t r) const override;
  std::uint64_t ball_bound(std::int64_t r) const override;
  std::string label(PointId x) const override;
  PointId parse_label(std::string_view text) const override;
  std::unique_ptr<Walker> walker(PointId start, std::int64_t jump) const override;

  int dimension() const noexcept { return dimension_; }
  LatticeMetric metric() const noexcept { return metric_; }
  std::vector<std::int64_t> coordinates(PointId x) const;
  PointId point(std::span<const std::int64_t> coords) const;
  PointId point(std::int64_t coord) const;  // Z^1 shorthand
  std::int64_t norm(std::span<const std::int64_t> v) const noexcept;
  /// Offsets o with 0 <= |o| <= r, flattened `dimension()` at a time.
  std::vector<std::int64_t> offsets(std::int64_t r) const;

 private:
  bool in_box(std::int64_t id) const noexcept { return id >= 0 && id < volume_; }

  int dimension_;
  LatticeMetric metric_;
  std::int64_t side_;
  std::int64_t volume_;
  std::vector<std::int64_t> stride_;
};

/// Rooted tree with `branching` children per vertex, truncated at depth
/// n_max. Ids are breadth-first: root 0, children of v are b*v+1 .. b*v+b.
class RootedTreeSpace final : public Space {
 public:
  RootedTreeSpace(int branching, std::int64_t depth);

  SpaceKind kind() const noexcept override { return SpaceKind::rooted_tree; }
  std::string describe() const override;
  bool contains(PointId x) const noexcept override;
  std::uint64_t size() const override;
  std::int64_t distance(PointId x, PointId y) const override;
  Ball ball(PointId x, std::int64_t r) const override;
  std::uint64_t ball_bound(std::int64_t r) const override;
  std::string label(PointId x) const override;
  PointId parse_label(std::string_view text) const override;
  std::unique_ptr<Walker> walker(PointId start, std::int64_t jump) const override;

  int branching() const noexcept { return branching_; }
  std::int64_t depth(PointId x) const;
  PointId parent(PointId x) const;
  PointId child(PointId x, int slot) const;

 private:
  int branching_;
  std::vector<std::int64_t> level_start_;  // level_start_[k] = first id at depth k
};

/// Ball of radius n_max in the Cayley graph of the free group on `rank`
/// generators. Letter 2i is generator i, letter 2i+1 its inverse.
class FreeGroupSpace final : public Space {
 public:
  FreeGroupSpace(int rank, std::int64_t radius);

  SpaceKind kind() const noexcept override { return SpaceKind::free_group; }
  std::string describe() const override;
  bool contains(PointId x) const noexcept override;
  std::uint64_t size() const override;
  std::int64_t distance(PointId x, PointId y) const override;
  Ball ball(PointId x, std::int64_t r) const override;
  std::uint64_t ball_bound(std::int64_t r) const override;
  std::string label(PointId x) const override;
  PointId parse_label(std::string_view text) const override;
  std::unique_ptr<Walker> walker(PointId start, std::int64_t jump) const override;

  int rank() const noexcept { return rank_; }
  std::int64_t length(PointId x) const;
  PointId parent(PointId x) const;
  std::vector<int> word(PointId x) const;
  /// Reduced product x * letter.
  PointId multiply(PointId x, int letter) const;

  static constexpr int inverse_letter(int letter) noexcept { return letter ^ 1; }

 private:
  friend class FreeGroupWalker;
  std::int64_t slot_count(std::int64_t level) const noexcept;

  int rank_;
  std::vector<std::int64_t> level_start_;
};

struct GraphSpec {
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;
  std::int64_t basepoint = 0;
};

/// Undirected graph with the shortest-path metric, restricted to the
/// connected component of the basepoint.
class GraphSpace final : public Space {
 public:
  GraphSpace(const GraphSpec& spec, std::int64_t radius);

  SpaceKind kind() const noexcept override { return SpaceKind::graph; }
  std::string describe() const override;
  bool contains(PointId x) const noexcept override;
  std::uint64_t size() const override;
  std::vector<PointId> points() const override;
  std::int64_t distance(PointId x, PointId y) const override;
  Ball ball(PointId x, std::int64_t r) const override;
  std::uint64_t ball_bound(std::int64_t r) const override;
  std::string label(PointId x) const override;
  PointId parse_label(std::string_view text) const override;

  std::size_t edge_count() const noexcept { return targets_.size() / 2; }

 private:
  std::int64_t index_of(std::int64_t node) const noexcept;

  std::vector<std::int64_t> nodes_;  // component, sorted
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> targets_;
  std::vector<std::int64_t> level_;  // distance from the basepoint
  std::uint64_t region_size_ = 0;
};

/// Y x F where F = {0, .., F-1} carries the discrete metric of diameter 1 and
/// d((y,f),(y',f')) = d_Y(y,y') + d_F(f,f').
class ProductSpace final : public Space {
 public:
  ProductSpace(SpacePtr base, int fiber_size);

  SpaceKind kind() const noexcept override { return SpaceKind::product; }
  std::string describe() const override;
  bool contains(PointId x) const noexcept override;
  std::uint64_t size() const override;
  std::vector<PointId> points() const override;
  std::int64_t distance(PointId x, PointId y) const override;
  Ball ball(PointId x, std::int64_t r) const override;
  std::uint64_t ball_bound(std::int64_t r) const override;
  std::string label(PointId x) const override;
  PointId parse_label(std::string_view text) const override;

  const SpacePtr& base() const noexcept { return base_; }
  int fiber_size() const noexcept { return fiber_size_; }
  PointId pack(PointId y, int f) const;
  std::pair<PointId, int> unpack(PointId x) const noexcept;

 private:
  SpacePtr base_;
  int fiber_size_;
};

struct LatticeShape {
  int dimension = 1;
  LatticeMetric metric = LatticeMetric::l1;
};
struct TreeShape {
  int branching = 2;
};
struct FreeGroupShape {
  int rank = 2;
};

struct SpaceSpec {
  std::variant<LatticeShape, TreeShape, FreeGroupShape, GraphSpec> shape;
  std::int64_t radius = 1;
};

SpacePtr make_space(const SpaceSpec& spec);

/// Parses `z<d>`, `tree<b>`, `free<r>` or `file:<path>` (edge list).
SpaceSpec parse_space_spec(std::string_view text, std::int64_t radius,
                           std::int64_t graph_basepoint = 0,
                           LatticeMetric metric = LatticeMetric::l1);

/// Plain-text edge list: one `u v` pair per line, `#` starts a comment.
GraphSpec read_edge_list(std::istream& in, std::int64_t basepoint);

}  // namespace wobblelab
