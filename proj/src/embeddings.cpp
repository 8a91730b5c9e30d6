#include "wobblelab/embeddings.hpp"

#include <algorithm>
#include <limits>

namespace wobblelab {

namespace {

using Pair = std::pair<PointId, PointId>;

bool by_source(const Pair& a, const Pair& b) { return a.first < b.first; }

std::size_t table_slot(const std::vector<Pair>& table, PointId x) {
  auto it = std::lower_bound(table.begin(), table.end(), Pair{x, x}, by_source);
  if (it == table.end() || it->first != x) throw OutOfRegionError("point outside the map's source region");
  return static_cast<std::size_t>(it - table.begin());
}

double value_at(const std::unordered_map<PointId, double>& f, PointId y) {
  auto it = f.find(y);
  return it == f.end() ? 0.0 : it->second;
}

}  // namespace

PointId CoarseMap::operator()(PointId x) const { return table[table_slot(table, x)].second; }

bool CoarseMap::lipschitz(std::int64_t c) const noexcept {
  for (std::size_t r = 0; r < phi_plus.size(); ++r) {
    if (phi_plus[r] > c * static_cast<std::int64_t>(r)) return false;
  }
  return true;
}

CoarseMap check_coarse_map(std::vector<Pair> table, SpacePtr source, SpacePtr target, std::int64_t r_check) {
  if (!source || !target) throw Error("coarse map needs source and target spaces");
  if (r_check < 0) throw Error("check radius must be >= 0");
  std::sort(table.begin(), table.end(), by_source);
  const std::vector<PointId> points = source->points();
  if (table.size() != points.size()) {
    throw Error("map table has " + std::to_string(table.size()) + " entries but the source region has " +
                std::to_string(points.size()) + " points");
  }
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].first != points[i]) throw Error("map table is not total on the source region");
    if (!target->contains(table[i].second)) {
      throw OutOfRegionError("map sends " + source->label(table[i].first) + " outside the target region");
    }
  }

  CoarseMap q;
  q.source = source;
  q.target = target;
  q.table = std::move(table);
  q.r_check = r_check;

  std::vector<PointId> images;
  for (const auto& [x, y] : q.table) images.push_back(y);
  std::sort(images.begin(), images.end());
  for (std::size_t i = 0; i < images.size();) {
    std::size_t j = i;
    while (j < images.size() && images[j] == images[i]) ++j;
    q.fiber_bound = std::max(q.fiber_bound, j - i);
    i = j;
  }
  q.injective = q.fiber_bound <= 1;

  constexpr std::int64_t kNone = std::numeric_limits<std::int64_t>::max();
  const auto slots = static_cast<std::size_t>(r_check) + 1;
  std::vector<std::int64_t> largest(slots, 0);
  std::vector<std::int64_t> smallest(slots, kNone);
  smallest[0] = 0;
  for (std::size_t i = 0; i < q.table.size(); ++i) {
    const Ball b = source->ball(q.table[i].first, r_check);
    for (const auto& p : b.points) {
      if (p.id <= q.table[i].first) continue;
      const std::size_t j = table_slot(q.table, p.id);
      const std::int64_t dy = target->distance(q.table[i].second, q.table[j].second);
      const auto d = static_cast<std::size_t>(p.distance);
      largest[d] = std::max(largest[d], dy);
      smallest[d] = std::min(smallest[d], dy);
    }
  }
  q.phi_plus.resize(slots);
  q.phi_minus.resize(slots);
  std::int64_t running = 0;
  for (std::size_t r = 0; r < slots; ++r) q.phi_plus[r] = running = std::max(running, largest[r]);
  running = kNone;
  for (std::size_t r = slots; r-- > 0;) {
    running = std::min(running, smallest[r]);
    q.phi_minus[r] = running == kNone ? -1 : running;  // -1: no pairs at these distances
  }
  return q;
}

FiberLift::FiberLift(const CoarseMap& q, int fiber_size) : source_(q.source), table_(q.table) {
  if (fiber_size < 1) throw Error("fibre size must be >= 1");
  if (static_cast<std::size_t>(fiber_size) < q.fiber_bound) {
    throw Error("fibre size " + std::to_string(fiber_size) + " is below the fibre bound K = " +
                std::to_string(q.fiber_bound) + "; the lift cannot be injective");
  }
  space_ = std::make_shared<const ProductSpace>(q.target, fiber_size);
  std::unordered_map<PointId, int> used;
  labels_.reserve(table_.size());
  for (const auto& [x, y] : table_) labels_.push_back(used[y]++);
}

std::size_t FiberLift::slot(PointId x) const { return table_slot(table_, x); }

int FiberLift::label(PointId x) const { return labels_[slot(x)]; }

PointId FiberLift::lift_point(PointId x) const {
  const std::size_t i = slot(x);
  return space_->pack(table_[i].second, labels_[i]);
}

Wobble FiberLift::lift(const Wobble& g) const {
  if (g.space() != source_) throw Error("wobble does not act on the map's source space");
  std::vector<Pair> table;
  for (auto [x, y] : g.moved()) table.emplace_back(lift_point(x), lift_point(y));
  return Wobble::from_table(space_, table);
}

EnergyTransfer energy_transfer(const CoarseMap& q, const std::unordered_map<PointId, double>& f, std::int64_t radius) {
  if (radius < 0 || radius > q.r_check) {
    throw Error("energy radius must lie in [0, " + std::to_string(q.r_check) + "]");
  }
  EnergyTransfer out;
  out.radius = radius;
  out.target_radius = q.phi_plus[static_cast<std::size_t>(radius)];

  std::vector<double> pulled;
  pulled.reserve(q.table.size());
  for (const auto& [x, y] : q.table) pulled.push_back(value_at(f, y));
  for (std::size_t i = 0; i < q.table.size(); ++i) {
    const Ball b = q.source->ball(q.table[i].first, radius);
    for (const auto& p : b.points) {
      if (p.id <= q.table[i].first) continue;
      const double d = pulled[i] - pulled[table_slot(q.table, p.id)];
      out.source_energy += d * d;
    }
  }

  for (const auto& [y, fy] : f) {
    if (!q.target->contains(y)) throw OutOfRegionError("function support outside the target region");
    const Ball b = q.target->ball(y, out.target_radius);
    for (const auto& p : b.points) {
      if (p.id == y) continue;
      const auto other = f.find(p.id);
      if (other != f.end() && p.id < y) continue;  // counted from the other end
      const double d = fy - (other == f.end() ? 0.0 : other->second);
      out.target_energy += d * d;
    }
    out.target_energy += static_cast<double>(b.outside) * fy * fy;
  }
  const auto k = static_cast<double>(q.fiber_bound);
  out.bound = k * k * out.target_energy;
  return out;
}

CoarseMap tree_into_free_group(std::int64_t depth, const std::shared_ptr<const FreeGroupSpace>& target) {
  if (!target) throw Error("tree embedding needs a target");
  if (target->rank() < 2) throw Error("tree embedding needs a free group of rank >= 2");
  if (depth < 0) throw Error("tree depth must be >= 0");
  if (depth > target->radius()) {
    throw OutOfRegionError("tree depth " + std::to_string(depth) + " exceeds the free-group ball radius " +
                           std::to_string(target->radius()));
  }
  auto tree = std::make_shared<const RootedTreeSpace>(2, depth);
  const std::vector<PointId> nodes = tree->points();
  std::vector<Pair> table;
  table.reserve(nodes.size());
  for (PointId v : nodes) {
    if (raw(v) == 0) {
      table.emplace_back(v, target->basepoint());
      continue;
    }
    const std::int64_t digit = (raw(v) - 1) % 2;
    const PointId parent_image = table[static_cast<std::size_t>((raw(v) - 1) / 2)].second;
    table.emplace_back(v, target->multiply(parent_image, digit == 0 ? 0 : 2));
  }
  return check_coarse_map(std::move(table), tree, target, 2 * depth);
}

std::shared_ptr<const GraphSpace> image_subgraph(const CoarseMap& q) {
  std::vector<PointId> image;
  for (const auto& [x, y] : q.table) image.push_back(y);
  std::sort(image.begin(), image.end());
  image.erase(std::unique(image.begin(), image.end()), image.end());
  GraphSpec spec;
  spec.basepoint = raw(q(q.source->basepoint()));
  for (PointId y : image) {
    for (const auto& p : q.target->ball(y, 1).points) {
      if (p.id > y && std::binary_search(image.begin(), image.end(), p.id)) spec.edges.emplace_back(raw(y), raw(p.id));
    }
  }
  return std::make_shared<const GraphSpace>(spec, static_cast<std::int64_t>(image.size()));
}

}  // namespace wobblelab
