#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <limits>

#include "wobblelab/random.hpp"
#include "wobblelab/spaces.hpp"

namespace wobblelab {

namespace {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return result;
}

// |{v in Z^d : |v|_1 <= r}| = sum_i 2^i C(d,i) C(r,i)
std::uint64_t l1_ball_count(int d, std::int64_t r) {
  if (r < 0) return 0;
  std::uint64_t total = 0;
  for (int i = 0; i <= d; ++i) {
    total += (std::uint64_t{1} << i) * binomial(static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(i)) *
             binomial(static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(i));
  }
  return total;
}

std::uint64_t cube_count(int d, std::int64_t r) {
  std::uint64_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::uint64_t>(2 * r + 1);
  return total;
}

void push_offsets(std::vector<std::int64_t>& out, std::vector<std::int64_t>& cur, int axis, std::int64_t budget,
                  LatticeMetric metric, std::int64_t r) {
  if (axis == static_cast<int>(cur.size())) {
    out.insert(out.end(), cur.begin(), cur.end());
    return;
  }
  const std::int64_t span = metric == LatticeMetric::l1 ? budget : r;
  for (std::int64_t c = -span; c <= span; ++c) {
    cur[static_cast<std::size_t>(axis)] = c;
    push_offsets(out, cur, axis + 1, budget - std::abs(c), metric, r);
  }
}

class LatticeWalker final : public Walker {
 public:
  LatticeWalker(const LatticeSpace& space, PointId start, std::int64_t jump)
      : space_(space), start_(space.coordinates(start)), jump_(jump) {
    const auto all = space.offsets(jump);
    const auto d = static_cast<std::size_t>(space.dimension());
    for (std::size_t i = 0; i < all.size(); i += d) {
      if (std::any_of(all.begin() + static_cast<std::ptrdiff_t>(i),
                      all.begin() + static_cast<std::ptrdiff_t>(i + d), [](std::int64_t c) { return c != 0; })) {
        steps_.insert(steps_.end(), all.begin() + static_cast<std::ptrdiff_t>(i),
                      all.begin() + static_cast<std::ptrdiff_t>(i + d));
      }
    }
  }

  TrialOutcome run(std::int64_t horizon, std::mt19937_64& rng) const override {
    if (jump_ == 1 && space_.metric() == LatticeMetric::l1) return run_unit(horizon, rng);
    const auto d = start_.size();
    const std::uint64_t choices = steps_.size() / d;
    const std::int64_t limit = space_.radius();
    std::vector<std::int64_t> at = start_;
    for (std::int64_t t = 0; t < horizon; ++t) {
      const std::size_t base = static_cast<std::size_t>(uniform_below(rng, choices)) * d;
      bool home = true;
      for (std::size_t i = 0; i < d; ++i) {
        at[i] += steps_[base + i];
        home = home && at[i] == start_[i];
      }
      if (space_.norm(at) > limit) return TrialOutcome::exited;
      if (home) return TrialOutcome::returned;
    }
    return TrialOutcome::escaped;
  }

 private:
  // nearest-neighbour l1 walk with incremental norm and distance-to-start
  TrialOutcome run_unit(std::int64_t horizon, std::mt19937_64& rng) const {
    const auto d = start_.size();
    const std::int64_t limit = space_.radius();
    std::vector<std::int64_t> at = start_;
    std::int64_t norm = space_.norm(at);
    std::int64_t away = 0;
    for (std::int64_t t = 0; t < horizon; ++t) {
      const std::uint64_t pick = uniform_below(rng, 2 * d);
      const std::size_t axis = pick >> 1;
      const std::int64_t old = at[axis];
      const std::int64_t now = (pick & 1) ? old - 1 : old + 1;
      at[axis] = now;
      norm += std::abs(now) - std::abs(old);
      away += std::abs(now - start_[axis]) - std::abs(old - start_[axis]);
      if (norm > limit) return TrialOutcome::exited;
      if (away == 0) return TrialOutcome::returned;
    }
    return TrialOutcome::escaped;
  }

  const LatticeSpace& space_;
  std::vector<std::int64_t> start_;
  std::int64_t jump_;
  std::vector<std::int64_t> steps_;
};

}  // namespace

LatticeSpace::LatticeSpace(int dimension, std::int64_t radius, LatticeMetric metric)
    : Space(radius, PointId{0}), dimension_(dimension), metric_(metric), side_(2 * radius + 1), volume_(1) {
  if (dimension < 1) throw Error("lattice dimension must be >= 1");
  if (radius < 1) throw Error("lattice radius must be >= 1");
  for (int i = 0; i < dimension; ++i) {
    stride_.push_back(volume_);
    if (volume_ > std::numeric_limits<std::int64_t>::max() / side_) {
      throw Error("lattice region too large for 64-bit point ids");
    }
    volume_ *= side_;
  }
  basepoint_ = point(std::vector<std::int64_t>(static_cast<std::size_t>(dimension), 0));
}

std::string LatticeSpace::describe() const {
  return "z" + std::to_string(dimension_) + (metric_ == LatticeMetric::linf ? "-linf" : "") + "[n=" +
         std::to_string(radius_) + "]";
}

std::int64_t LatticeSpace::norm(std::span<const std::int64_t> v) const noexcept {
  std::int64_t n = 0;
  for (auto c : v) n = metric_ == LatticeMetric::l1 ? n + std::abs(c) : std::max(n, std::abs(c));
  return n;
}

std::vector<std::int64_t> LatticeSpace::coordinates(PointId x) const {
  if (!in_box(raw(x))) require(x);
  std::vector<std::int64_t> c(static_cast<std::size_t>(dimension_));
  std::int64_t rest = raw(x);
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = rest % side_ - radius_;
    rest /= side_;
  }
  return c;
}

PointId LatticeSpace::point(std::span<const std::int64_t> coords) const {
  if (coords.size() != static_cast<std::size_t>(dimension_)) throw Error("coordinate dimension mismatch");
  if (norm(coords) > radius_) {
    throw OutOfRegionError("lattice point outside working region of " + describe());
  }
  std::int64_t id = 0;
  for (std::size_t i = 0; i < coords.size(); ++i) id += (coords[i] + radius_) * stride_[i];
  return PointId{id};
}

PointId LatticeSpace::point(std::int64_t coord) const { return point(std::span<const std::int64_t>(&coord, 1)); }

bool LatticeSpace::contains(PointId x) const noexcept {
  if (!in_box(raw(x))) return false;
  std::int64_t rest = raw(x);
  std::int64_t n = 0;
  for (int i = 0; i < dimension_; ++i) {
    const std::int64_t c = std::abs(rest % side_ - radius_);
    n = metric_ == LatticeMetric::l1 ? n + c : std::max(n, c);
    rest /= side_;
  }
  return n <= radius_;
}

std::uint64_t LatticeSpace::size() const { return ball_bound(radius_); }

std::uint64_t LatticeSpace::ball_bound(std::int64_t r) const {
  return metric_ == LatticeMetric::l1 ? l1_ball_count(dimension_, r) : cube_count(dimension_, r);
}

std::vector<std::int64_t> LatticeSpace::offsets(std::int64_t r) const {
  std::vector<std::int64_t> out;
  if (r < 0) return out;
  out.reserve(ball_bound(r) * static_cast<std::size_t>(dimension_));
  std::vector<std::int64_t> cur(static_cast<std::size_t>(dimension_), 0);
  push_offsets(out, cur, 0, r, metric_, r);
  return out;
}

std::int64_t LatticeSpace::distance(PointId x, PointId y) const {
  require(x);
  require(y);
  auto a = coordinates(x);
  const auto b = coordinates(y);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return norm(a);
}

Ball LatticeSpace::ball(PointId x, std::int64_t r) const {
  require(x);
  const auto center = coordinates(x);
  const auto offs = offsets(r);
  const auto d = static_cast<std::size_t>(dimension_);
  Ball out;
  out.points.reserve(offs.size() / d);
  std::vector<std::int64_t> y(d);
  for (std::size_t i = 0; i < offs.size(); i += d) {
    for (std::size_t k = 0; k < d; ++k) y[k] = center[k] + offs[i + k];
    if (norm(y) > radius_) {
      ++out.outside;
      continue;
    }
    std::int64_t id = 0;
    for (std::size_t k = 0; k < d; ++k) id += (y[k] + radius_) * stride_[k];
    out.points.push_back({PointId{id}, norm(std::span<const std::int64_t>(offs.data() + i, d))});
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const BallPoint& a, const BallPoint& b) { return a.id < b.id; });
  return out;
}

std::string LatticeSpace::label(PointId x) const {
  const auto c = coordinates(x);
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(c[i]);
  }
  return s;
}

PointId LatticeSpace::parse_label(std::string_view text) const {
  std::vector<std::int64_t> c;
  while (true) {
    const auto comma = text.find(',');
    const auto tok = text.substr(0, comma);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw Error("bad lattice coordinate '" + std::string(tok) + "'");
    }
    c.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return point(c);
}

std::unique_ptr<Walker> LatticeSpace::walker(PointId start, std::int64_t jump) const {
  require(start);
  if (jump < 1) throw Error("walk jump radius must be >= 1");
  return std::make_unique<LatticeWalker>(*this, start, jump);
}

}  // namespace wobblelab
