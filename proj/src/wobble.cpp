#include "wobblelab/wobble.hpp"

#include <algorithm>

#include "wobblelab/random.hpp"

namespace wobblelab {

namespace {

bool by_first(const Wobble::Pair& a, const Wobble::Pair& b) { return a.first < b.first; }

const PointId* lookup(const std::vector<Wobble::Pair>& pairs, PointId x) {
  auto it = std::lower_bound(pairs.begin(), pairs.end(), Wobble::Pair{x, x}, by_first);
  return it != pairs.end() && it->first == x ? &it->second : nullptr;
}

const LatticeSpace& as_line(const SpacePtr& space) {
  const auto* lattice = dynamic_cast<const LatticeSpace*>(space.get());
  if (lattice == nullptr || lattice->dimension() != 1) throw Error("expected the one-dimensional lattice");
  return *lattice;
}

}  // namespace

Wobble::Wobble(SpacePtr space) : space_(std::move(space)) {
  if (!space_) throw Error("wobble needs a space");
}

Wobble::Wobble(SpacePtr space, std::vector<Pair> forward) : space_(std::move(space)), forward_(std::move(forward)) {
  if (!space_) throw Error("wobble needs a space");
  std::sort(forward_.begin(), forward_.end(), by_first);
  for (std::size_t i = 0; i < forward_.size(); ++i) {
    const auto [x, y] = forward_[i];
    if (i > 0 && forward_[i - 1].first == x) throw Error("wobble table lists a point twice");
    if (x == y) throw Error("wobble table contains a fixed point");
    if (!space_->contains(x) || !space_->contains(y)) {
      throw OutOfRegionError("wobble moves points outside the working region of " + space_->describe());
    }
  }
  backward_.reserve(forward_.size());
  for (auto [x, y] : forward_) backward_.emplace_back(y, x);
  std::sort(backward_.begin(), backward_.end(), by_first);
  for (std::size_t i = 0; i < backward_.size(); ++i) {
    // a bijection permutes its support: images are distinct and form the same set
    if ((i > 0 && backward_[i - 1].first == backward_[i].first) || backward_[i].first != forward_[i].first) {
      throw Error("wobble table is not a bijection of its support");
    }
  }
  for (auto [x, y] : forward_) norm_ = std::max(norm_, space_->distance(x, y));
}

Wobble Wobble::from_transpositions(SpacePtr space, std::span<const Pair> swaps) {
  std::vector<Pair> forward;
  for (auto [a, b] : swaps) {
    if (a == b) continue;
    forward.emplace_back(a, b);
    forward.emplace_back(b, a);
  }
  std::sort(forward.begin(), forward.end(), by_first);
  for (std::size_t i = 1; i < forward.size(); ++i) {
    if (forward[i - 1].first == forward[i].first) throw Error("transpositions are not disjoint");
  }
  return Wobble(std::move(space), std::move(forward));
}

Wobble Wobble::from_table(SpacePtr space, std::span<const Pair> table) {
  std::vector<Pair> entries(table.begin(), table.end());
  std::sort(entries.begin(), entries.end(), by_first);
  std::vector<PointId> images;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0 && entries[i - 1].first == entries[i].first) throw Error("wobble table lists a point twice");
    images.push_back(entries[i].second);
  }
  std::sort(images.begin(), images.end());
  if (std::adjacent_find(images.begin(), images.end()) != images.end()) {
    throw Error("wobble table is not injective");
  }
  auto in_domain = [&](PointId p) { return lookup(entries, p) != nullptr; };

  std::vector<Pair> forward;
  for (auto [x, y] : entries) {
    if (x != y) forward.emplace_back(x, y);
  }
  for (auto [start, next] : entries) {
    if (std::binary_search(images.begin(), images.end(), start)) continue;
    PointId end = next;
    while (in_domain(end)) end = *lookup(entries, end);
    forward.emplace_back(end, start);
  }
  return Wobble(std::move(space), std::move(forward));
}

PointId Wobble::apply(PointId x) const {
  const PointId* y = lookup(forward_, x);
  return y != nullptr ? *y : x;
}

PointId Wobble::apply_inverse(PointId x) const {
  const PointId* y = lookup(backward_, x);
  return y != nullptr ? *y : x;
}

Wobble Wobble::inverse() const { return Wobble(space_, backward_); }

std::vector<PointId> Wobble::support() const {
  std::vector<PointId> out;
  out.reserve(forward_.size());
  for (const auto& p : forward_) out.push_back(p.first);
  return out;
}

bool Wobble::is_involution() const {
  return std::all_of(forward_.begin(), forward_.end(), [this](const Pair& p) { return apply(p.second) == p.first; });
}

std::int64_t Wobble::displacement_on(std::span<const PointId> points) const {
  std::int64_t best = 0;
  for (PointId x : points) {
    const PointId y = apply(x);
    if (y != x) best = std::max(best, space_->distance(x, y));
  }
  return best;
}

Wobble compose(const Wobble& g, const Wobble& h) {
  if (g.space() != h.space()) throw Error("cannot compose wobbles on different spaces");
  std::vector<PointId> points = g.support();
  for (const auto& p : h.moved()) points.push_back(p.first);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<Wobble::Pair> table;
  for (PointId x : points) {
    const PointId y = g.apply(h.apply(x));
    if (y != x) table.emplace_back(x, y);
  }
  return Wobble::from_table(g.space(), table);
}

Wobble cyclic_shift(const SpacePtr& line, std::int64_t m) {
  const LatticeSpace& z = as_line(line);
  if (m < 1) throw Error("cyclic shift needs m >= 1");
  std::vector<Wobble::Pair> table;
  for (std::int64_t x = -m; x < m; ++x) table.emplace_back(z.point(x), z.point(x + 1));
  table.emplace_back(z.point(m), z.point(-m));
  return Wobble::from_table(line, table);
}

Wobble pair_swaps(const SpacePtr& line, std::int64_t lo, std::int64_t hi) {
  const LatticeSpace& z = as_line(line);
  std::vector<Wobble::Pair> swaps;
  for (std::int64_t j = lo; j + 1 <= hi; ++j) {
    if (j % 2 == 0) swaps.emplace_back(z.point(j), z.point(j + 1));
  }
  return Wobble::from_transpositions(line, swaps);
}

Wobble block_translation(const SpacePtr& lattice, std::span<const PointId> block,
                         std::span<const std::int64_t> shift) {
  const auto* z = dynamic_cast<const LatticeSpace*>(lattice.get());
  if (z == nullptr) throw Error("block translation needs a lattice");
  if (shift.size() != static_cast<std::size_t>(z->dimension())) throw Error("shift has the wrong dimension");
  std::vector<Wobble::Pair> table;
  for (PointId x : block) {
    auto c = z->coordinates(x);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += shift[i];
    table.emplace_back(x, z->point(c));
  }
  return Wobble::from_table(lattice, table);
}

Wobble random_wobble(const SpacePtr& space, std::span<const PointId> pool, std::mt19937_64& rng) {
  std::vector<PointId> chosen(pool.begin(), pool.end());
  if (chosen.size() < 2) return Wobble(space);
  const std::size_t count = 2 + uniform_below(rng, chosen.size() - 1);
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(chosen[i], chosen[i + uniform_below(rng, chosen.size() - i)]);
  }
  chosen.resize(count);
  std::vector<PointId> images = chosen;
  for (std::size_t i = images.size(); i > 1; --i) std::swap(images[i - 1], images[uniform_below(rng, i)]);
  std::vector<Wobble::Pair> table;
  for (std::size_t i = 0; i < count; ++i) table.emplace_back(chosen[i], images[i]);
  return Wobble::from_table(space, table);
}

}  // namespace wobblelab
