#include <algorithm>
#include <charconv>
#include <limits>
#include <unordered_set>

#include "wobblelab/spaces.hpp"

namespace wobblelab {

namespace {

constexpr std::int64_t kUnreached = std::numeric_limits<std::int64_t>::max();

}  // namespace

GraphSpace::GraphSpace(const GraphSpec& spec, std::int64_t radius) : Space(radius, PointId{spec.basepoint}) {
  if (radius < 1) throw Error("graph region radius must be >= 1");
  if (spec.basepoint < 0) throw Error("graph basepoint must be a nonnegative id");

  std::vector<std::int64_t> all{spec.basepoint};
  for (auto [u, v] : spec.edges) {
    if (u < 0 || v < 0) throw Error("malformed edge list: negative vertex id");
    all.push_back(u);
    all.push_back(v);
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  auto idx = [&all](std::int64_t v) {
    return static_cast<std::size_t>(std::lower_bound(all.begin(), all.end(), v) - all.begin());
  };

  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  for (auto [u, v] : spec.edges) {
    if (u == v) continue;
    arcs.emplace_back(idx(u), idx(v));
    arcs.emplace_back(idx(v), idx(u));
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
  std::vector<std::size_t> first(all.size() + 1, 0);
  for (auto [a, b] : arcs) ++first[a + 1];
  for (std::size_t i = 0; i < all.size(); ++i) first[i + 1] += first[i];

  // component of the basepoint
  std::vector<std::int64_t> dist(all.size(), kUnreached);
  std::vector<std::size_t> queue{idx(spec.basepoint)};
  dist[queue.front()] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t u = queue[head];
    for (std::size_t e = first[u]; e < first[u + 1]; ++e) {
      const std::size_t v = arcs[e].second;
      if (dist[v] == kUnreached) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  if (queue.size() < all.size()) {
    warnings_.push_back("graph is disconnected: dropped " + std::to_string(all.size() - queue.size()) +
                        " vertices outside the basepoint's component");
  }

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (dist[i] != kUnreached) keep.push_back(i);
  }
  std::vector<std::size_t> remap(all.size(), 0);
  for (std::size_t k = 0; k < keep.size(); ++k) {
    remap[keep[k]] = k;
    nodes_.push_back(all[keep[k]]);
    level_.push_back(dist[keep[k]]);
    if (dist[keep[k]] <= radius) ++region_size_;
  }
  if (nodes_.size() > std::numeric_limits<std::uint32_t>::max()) throw Error("graph too large");
  offsets_.push_back(0);
  for (std::size_t i : keep) {
    for (std::size_t e = first[i]; e < first[i + 1]; ++e) {
      targets_.push_back(static_cast<std::uint32_t>(remap[arcs[e].second]));
    }
    offsets_.push_back(targets_.size());
  }
}

std::string GraphSpace::describe() const {
  return "graph[V=" + std::to_string(nodes_.size()) + ",E=" + std::to_string(edge_count()) +
         ",base=" + std::to_string(raw(basepoint_)) + ",n=" + std::to_string(radius_) + "]";
}

std::int64_t GraphSpace::index_of(std::int64_t node) const noexcept {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), node);
  if (it == nodes_.end() || *it != node) return -1;
  return it - nodes_.begin();
}

bool GraphSpace::contains(PointId x) const noexcept {
  const std::int64_t i = index_of(raw(x));
  return i >= 0 && level_[static_cast<std::size_t>(i)] <= radius_;
}

std::uint64_t GraphSpace::size() const { return region_size_; }

std::vector<PointId> GraphSpace::points() const {
  std::vector<PointId> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (level_[i] <= radius_) out.push_back(PointId{nodes_[i]});
  }
  return out;
}

std::int64_t GraphSpace::distance(PointId x, PointId y) const {
  require(x);
  require(y);
  const auto from = static_cast<std::size_t>(index_of(raw(x)));
  const auto to = static_cast<std::size_t>(index_of(raw(y)));
  if (from == to) return 0;
  std::vector<std::int64_t> dist(nodes_.size(), kUnreached);
  std::vector<std::size_t> queue{from};
  dist[from] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t u = queue[head];
    for (std::size_t e = offsets_[u]; e < offsets_[u + 1]; ++e) {
      const std::size_t v = targets_[e];
      if (dist[v] != kUnreached) continue;
      dist[v] = dist[u] + 1;
      if (v == to) return dist[v];
      queue.push_back(v);
    }
  }
  throw Error("unreachable vertex in a connected component");
}

Ball GraphSpace::ball(PointId x, std::int64_t r) const {
  require(x);
  const auto from = static_cast<std::size_t>(index_of(raw(x)));
  Ball out;
  std::vector<std::pair<std::size_t, std::int64_t>> queue{{from, 0}};
  std::unordered_set<std::size_t> seen{from};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto [u, d] = queue[head];
    if (level_[u] <= radius_) {
      out.points.push_back({PointId{nodes_[u]}, d});
    } else {
      ++out.outside;
    }
    if (d == r) continue;
    for (std::size_t e = offsets_[u]; e < offsets_[u + 1]; ++e) {
      const std::size_t v = targets_[e];
      if (!seen.insert(v).second) continue;
      queue.emplace_back(v, d + 1);
    }
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const BallPoint& a, const BallPoint& b) { return a.id < b.id; });
  return out;
}

std::uint64_t GraphSpace::ball_bound(std::int64_t r) const {
  std::uint64_t best = 1;
  for (PointId x : points()) {
    const Ball b = ball(x, r);
    best = std::max<std::uint64_t>(best, b.points.size() + b.outside);
  }
  return best;
}

std::string GraphSpace::label(PointId x) const {
  require(x);
  return std::to_string(raw(x));
}

PointId GraphSpace::parse_label(std::string_view text) const {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error("bad graph vertex '" + std::string(text) + "'");
  }
  require(PointId{v});
  return PointId{v};
}

}  // namespace wobblelab
