#include "wobblelab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wobblelab {

std::optional<std::size_t> RBallGraph::index_of(PointId p) const noexcept {
  if (vertices_.empty()) return std::nullopt;
  if (contiguous_) {
    const std::int64_t i = raw(p) - raw(vertices_.front());
    if (i < 0 || i >= static_cast<std::int64_t>(vertices_.size())) return std::nullopt;
    return static_cast<std::size_t>(i);
  }
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), p);
  if (it == vertices_.end() || *it != p) return std::nullopt;
  return static_cast<std::size_t>(it - vertices_.begin());
}

RBallGraph build_rball_graph(SpacePtr space, PointId root, std::int64_t radius, std::int64_t jump) {
  if (!space) throw Error("build_rball_graph: null space");
  if (jump < 1) throw Error("jump radius R must be >= 1");
  if (radius < 0) throw Error("graph radius must be >= 0");
  if (!space->contains(root)) throw OutOfRegionError("graph root outside the working region");

  RBallGraph g;
  g.space_ = space;
  g.root_ = root;
  g.radius_ = radius;
  g.jump_ = jump;
  {
    const Ball region = space->ball(root, radius);
    if (region.clipped()) {
      throw OutOfRegionError("B(x0, " + std::to_string(radius) + ") exceeds the working region of " +
                             space->describe());
    }
    if (region.size() >= std::numeric_limits<std::uint32_t>::max()) throw Error("graph too large");
    g.vertices_.reserve(region.size());
    g.level_.reserve(region.size());
    for (const auto& p : region.points) {
      g.vertices_.push_back(p.id);
      g.level_.push_back(static_cast<std::int32_t>(p.distance));
    }
  }
  const std::size_t n = g.vertices_.size();
  g.contiguous_ = raw(g.vertices_.back()) - raw(g.vertices_.front()) + 1 == static_cast<std::int64_t>(n);

  g.adjacency_.reserve(2 * n);
  g.offsets_.reserve(n + 1);
  g.interior_.assign(n, 0);
  g.offsets_.push_back(0);
  for (std::size_t i = 0; i < n; ++i) {
    const PointId v = g.vertices_[i];
    const Ball b = space->ball(v, jump);
    bool inside = !b.clipped();
    for (const auto& p : b.points) {
      if (p.id == v) continue;
      if (auto j = g.index_of(p.id)) {
        g.adjacency_.push_back(static_cast<std::uint32_t>(*j));
      } else {
        inside = false;
      }
    }
    g.interior_[i] = inside ? 1 : 0;
    g.offsets_.push_back(g.adjacency_.size());
  }
  g.adjacency_.shrink_to_fit();
  return g;
}

double dirichlet_energy(const RBallGraph& g, std::span<const double> values) {
  if (values.size() != g.vertex_count()) {
    throw Error("dirichlet_energy: expected " + std::to_string(g.vertex_count()) + " values, got " +
                std::to_string(values.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    for (std::uint32_t j : g.neighbors(i)) {
      if (j > i) {
        const double diff = values[i] - values[j];
        total += diff * diff;
      }
    }
  }
  return total;
}

double dirichlet_energy(const RBallGraph& g, const std::unordered_map<PointId, double>& values) {
  std::vector<double> dense(g.vertex_count());
  for (std::size_t i = 0; i < dense.size(); ++i) {
    auto it = values.find(g.vertex(i));
    if (it == values.end()) {
      throw Error("dirichlet_energy: missing value at " + g.space()->label(g.vertex(i)));
    }
    dense[i] = it->second;
  }
  return dirichlet_energy(g, dense);
}

CapacityResult capacity_truncated(const RBallGraph& g, PointId x0, const CapacityOptions& options) {
  const auto src = g.index_of(x0);
  if (!src) throw Error("capacity_truncated: x0 is not a vertex of the graph");
  const std::int64_t shell = g.radius() - g.jump();
  if (g.level(*src) > shell) throw Error("capacity_truncated: x0 lies on the boundary shell");

  const std::size_t n = g.vertex_count();
  constexpr std::uint32_t kPinned = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> unknown(n, kPinned);
  CapacityResult result;
  result.profile.source = x0;
  std::uint32_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (g.level(i) > shell) {
      result.profile.boundary.push_back(i);
    } else if (i != *src) {
      unknown[i] = count++;
    }
  }

  if (result.profile.boundary.empty()) {
    result.profile.values.assign(n, 1.0);
    result.capacity = 0.0;
    result.degenerate = true;
    result.stats.converged = true;
    return result;
  }

  std::vector<std::size_t> free_vertex(count);
  std::vector<double> rhs(count, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (unknown[i] == kPinned) continue;
    free_vertex[unknown[i]] = i;
    for (std::uint32_t j : g.neighbors(i)) {
      if (j == *src) rhs[unknown[i]] += 1.0;
    }
  }

  // graph Laplacian with the Dirichlet rows and columns eliminated
  auto apply = [&](std::span<const double> in, std::span<double> out) {
    for (std::size_t k = 0; k < free_vertex.size(); ++k) {
      const std::size_t i = free_vertex[k];
      double acc = static_cast<double>(g.degree(i)) * in[k];
      for (std::uint32_t j : g.neighbors(i)) {
        if (unknown[j] != kPinned) acc -= in[unknown[j]];
      }
      out[k] = acc;
    }
  };

  std::vector<double> solution(count, 0.0);
  const auto max_iterations =
      static_cast<std::size_t>(std::ceil(options.iteration_factor * std::sqrt(static_cast<double>(n))));
  result.stats = conjugate_gradient(apply, rhs, solution, options.relative_tolerance, max_iterations);
  if (!result.stats.converged) {
    throw SolverError("capacity solve did not reach relative residual " + std::to_string(options.relative_tolerance) +
                      " within " + std::to_string(max_iterations) + " iterations (reached " +
                      std::to_string(result.stats.relative_residual) + ")");
  }

  result.profile.values.assign(n, 0.0);
  result.profile.values[*src] = 1.0;
  for (std::size_t k = 0; k < count; ++k) result.profile.values[free_vertex[k]] = solution[k];
  result.capacity = dirichlet_energy(g, result.profile.values);
  return result;
}

double harmonic_residual(const RBallGraph& g, const HarmonicProfile& profile) {
  const auto src = g.index_of(profile.source);
  std::vector<std::uint8_t> pinned(g.vertex_count(), 0);
  for (std::size_t b : profile.boundary) pinned[b] = 1;
  if (src) pinned[*src] = 1;
  double worst = 0.0;
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    if (pinned[i] || g.degree(i) == 0) continue;
    double sum = 0.0;
    for (std::uint32_t j : g.neighbors(i)) sum += profile.values[j];
    worst = std::max(worst, std::abs(profile.values[i] - sum / static_cast<double>(g.degree(i))));
  }
  return worst;
}

CapacityReport capacity_profile(const SpacePtr& space, PointId x0, std::int64_t jump,
                                std::span<const std::int64_t> radii, const CapacityOptions& options) {
  if (radii.empty()) throw Error("capacity_profile: no radii given");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (radii[i] <= radii[i - 1]) throw Error("capacity_profile: radii must be strictly increasing");
  }
  CapacityReport report;
  report.space = space->describe();
  report.jump = jump;
  for (std::int64_t n : radii) {
    const RBallGraph g = build_rball_graph(space, x0, n, jump);
    const CapacityResult r = capacity_truncated(g, x0, options);
    report.radii.push_back(n);
    report.cap_values.push_back(r.capacity);
    report.residuals.push_back(r.stats.relative_residual);
    report.iterations.push_back(r.stats.iterations);
  }
  if (radii.size() < 3) {
    report.classification.note = "classification needs at least 3 radii";
  } else {
    report.classification = classify_capacities(report.radii, report.cap_values, options.relative_tolerance);
  }
  return report;
}

}  // namespace wobblelab
