#pragma once

// Discrete potential theory on R-ball graphs: Dirichlet energy, truncated
// capacity (effective conductance from x0 to the truncation shell), the
// harmonic minimizer, recurrence/transience classification across radii and
// Monte-Carlo escape probabilities.
//
// Energy convention: sums run over unordered edges, so each unit resistor is
// counted once. The capacity reported here is that energy (a conductance),
// i.e. the square of the root-energy infimum; positivity is unaffected.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "wobblelab/conjugate_gradient.hpp"
#include "wobblelab/spaces.hpp"

namespace wobblelab {

/// Graph on B(root, radius) with an edge between distinct points at distance
/// at most `jump`. Vertices are stored sorted by point id.
class RBallGraph {
 public:
  const SpacePtr& space() const noexcept { return space_; }
  PointId root() const noexcept { return root_; }
  std::int64_t radius() const noexcept { return radius_; }
  std::int64_t jump() const noexcept { return jump_; }

  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return adjacency_.size() / 2; }
  PointId vertex(std::size_t i) const { return vertices_[i]; }
  const std::vector<PointId>& vertices() const noexcept { return vertices_; }
  std::optional<std::size_t> index_of(PointId p) const noexcept;

  std::span<const std::uint32_t> neighbors(std::size_t i) const noexcept {
    return {adjacency_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::size_t degree(std::size_t i) const noexcept { return offsets_[i + 1] - offsets_[i]; }
  /// d(root, v)
  std::int64_t level(std::size_t i) const noexcept { return level_[i]; }
  /// B(v, jump) lies inside the vertex set
  bool interior(std::size_t i) const noexcept { return interior_[i] != 0; }

  friend RBallGraph build_rball_graph(SpacePtr space, PointId root, std::int64_t radius, std::int64_t jump);

 private:
  SpacePtr space_;
  PointId root_{0};
  std::int64_t radius_ = 0;
  std::int64_t jump_ = 1;
  std::vector<PointId> vertices_;
  bool contiguous_ = false;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> adjacency_;
  std::vector<std::int32_t> level_;
  std::vector<std::uint8_t> interior_;
};

RBallGraph build_rball_graph(SpacePtr space, PointId root, std::int64_t radius, std::int64_t jump);

/// Sum over unordered edges of (a(x) - a(x'))^2; `values` is indexed like the
/// graph's vertices.
double dirichlet_energy(const RBallGraph& g, std::span<const double> values);
double dirichlet_energy(const RBallGraph& g, const std::unordered_map<PointId, double>& values);

struct HarmonicProfile {
  PointId source{0};
  std::vector<double> values;         // indexed like the graph's vertices
  std::vector<std::size_t> boundary;  // vertex indices pinned to 0
};

struct CapacityResult {
  double capacity = 0.0;
  HarmonicProfile profile;
  SolveStats stats;
  /// No boundary to pin: the component is finite, capacity is 0 and the
  /// profile is constant.
  bool degenerate = false;
};

struct CapacityOptions {
  double relative_tolerance = 1e-10;
  double iteration_factor = 50.0;  // cap = factor * sqrt(|V|)
};

class SolverError : public Error {
 public:
  using Error::Error;
};

/// Minimum Dirichlet energy over a with a(x0) = 1 and a = 0 on the shell of
/// vertices with level > radius - jump. Vertices of that shell are the only
/// ones with edges leaving the ball, so the minimum is taken over functions
/// supported in B(root, radius - jump) with their full energy.
CapacityResult capacity_truncated(const RBallGraph& g, PointId x0, const CapacityOptions& options = {});

/// Largest |a(x) - mean of a over neighbours| over unpinned vertices.
double harmonic_residual(const RBallGraph& g, const HarmonicProfile& profile);

enum class Recurrence { recurrent, transient, inconclusive };
std::string to_string(Recurrence r);

enum class DecayModel { limit, logarithmic, power };
std::string to_string(DecayModel m);

/// Two-parameter fit of capacity against radius.
///   limit:        cap = L + b / n
///   logarithmic:  cap = 1 / (alpha log n + beta)
///   power:        cap = c n^(-alpha)
struct ModelFit {
  DecayModel model = DecayModel::limit;
  double first = 0.0;   // L, alpha, c
  double second = 0.0;  // b, beta, alpha
  double rss = 0.0;     // sum of squared relative residuals
  bool eligible = false;
  double predict(double n) const;
};

struct Classification {
  Recurrence label = Recurrence::inconclusive;
  std::optional<DecayModel> preferred;
  std::optional<double> extrapolated_limit;
  std::vector<ModelFit> fits;
  std::string note;
};

/// Picks the best-fitting eligible model (all have two parameters, so the
/// information criterion reduces to the residual sum of squares). The limit
/// model is eligible when L > 10 * tolerance; the decaying ones when their
/// exponent is positive.
Classification classify_capacities(std::span<const std::int64_t> radii, std::span<const double> caps,
                                   double solver_tolerance);

struct CapacityReport {
  std::string space;
  std::int64_t jump = 1;
  std::vector<std::int64_t> radii;
  std::vector<double> cap_values;
  std::vector<double> residuals;
  std::vector<std::size_t> iterations;
  Classification classification;
};

CapacityReport capacity_profile(const SpacePtr& space, PointId x0, std::int64_t jump,
                                std::span<const std::int64_t> radii, const CapacityOptions& options = {});

struct EscapeEstimate {
  double estimate = 0.0;
  double ci95 = 0.0;
  std::int64_t trials = 0;
  std::int64_t horizon = 0;
  std::int64_t escapes = 0;  // includes exits
  std::int64_t exits = 0;    // walks that left the working region
  std::int64_t returns = 0;
  bool isolated = false;
};

/// Fraction of walks from x0, stepping uniformly on B(x, R) \ {x}, that do
/// not revisit x0 within `horizon` steps. Trial i draws from its own stream
/// seeded by (seed, i), so the result does not depend on `threads`.
EscapeEstimate mc_escape_probability(const Space& space, PointId x0, std::int64_t jump, std::int64_t horizon,
                                     std::int64_t trials, std::uint64_t seed, unsigned threads = 0);

}  // namespace wobblelab
