#include "wobblelab/spaces.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include "wobblelab/random.hpp"

namespace wobblelab {

bool Ball::contains(PointId p) const noexcept {
  auto it = std::lower_bound(points.begin(), points.end(), p,
                             [](const BallPoint& b, PointId id) { return b.id < id; });
  return it != points.end() && it->id == p;
}

std::vector<PointId> Ball::ids() const {
  std::vector<PointId> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.id);
  return out;
}

std::vector<PointId> Space::points() const { return ball(basepoint_, radius_).ids(); }

void Space::require(PointId x) const {
  if (!contains(x)) {
    throw OutOfRegionError("point " + std::to_string(raw(x)) + " is outside the working region of " +
                           describe());
  }
}

namespace {

// Steps by sampling the materialized punctured ball; points cut off by the
// truncation still count toward the uniform choice and end the trial as exits.
class BallWalker final : public Walker {
 public:
  BallWalker(const Space& space, PointId start, std::int64_t jump)
      : space_(space), start_(start), jump_(jump) {}

  TrialOutcome run(std::int64_t horizon, std::mt19937_64& rng) const override {
    PointId at = start_;
    for (std::int64_t t = 0; t < horizon; ++t) {
      const Ball b = space_.ball(at, jump_);
      const std::uint64_t inside = b.points.size() - 1;
      const std::uint64_t total = inside + b.outside;
      if (total == 0) return TrialOutcome::isolated;
      std::uint64_t pick = uniform_below(rng, total);
      if (pick >= inside) return TrialOutcome::exited;
      // skip the center
      for (const auto& p : b.points) {
        if (p.id == at) continue;
        if (pick-- == 0) {
          at = p.id;
          break;
        }
      }
      if (at == start_) return TrialOutcome::returned;
    }
    return TrialOutcome::escaped;
  }

 private:
  const Space& space_;
  PointId start_;
  std::int64_t jump_;
};

}  // namespace

std::unique_ptr<Walker> Space::walker(PointId start, std::int64_t jump) const {
  require(start);
  if (jump < 1) throw Error("walk jump radius must be >= 1");
  return std::make_unique<BallWalker>(*this, start, jump);
}

// ---------------------------------------------------------------------------
// ProductSpace

ProductSpace::ProductSpace(SpacePtr base, int fiber_size)
    : Space(base ? base->radius() + 1 : 0, PointId{0}), base_(std::move(base)), fiber_size_(fiber_size) {
  if (!base_) throw Error("product space needs a base space");
  if (fiber_size_ < 1) throw Error("fiber size must be >= 1");
  basepoint_ = pack(base_->basepoint(), 0);
}

std::string ProductSpace::describe() const {
  return base_->describe() + "xF" + std::to_string(fiber_size_);
}

PointId ProductSpace::pack(PointId y, int f) const {
  if (f < 0 || f >= fiber_size_) throw Error("fiber label out of range");
  if (raw(y) > (std::numeric_limits<std::int64_t>::max() - f) / fiber_size_) {
    throw Error("product id overflow");
  }
  return PointId{raw(y) * fiber_size_ + f};
}

std::pair<PointId, int> ProductSpace::unpack(PointId x) const noexcept {
  return {PointId{raw(x) / fiber_size_}, static_cast<int>(raw(x) % fiber_size_)};
}

bool ProductSpace::contains(PointId x) const noexcept {
  if (raw(x) < 0) return false;
  return base_->contains(unpack(x).first);
}

std::uint64_t ProductSpace::size() const { return base_->size() * static_cast<std::uint64_t>(fiber_size_); }

std::vector<PointId> ProductSpace::points() const {
  std::vector<PointId> out;
  for (PointId y : base_->points()) {
    for (int f = 0; f < fiber_size_; ++f) out.push_back(pack(y, f));
  }
  return out;
}

std::int64_t ProductSpace::distance(PointId x, PointId y) const {
  require(x);
  require(y);
  auto [bx, fx] = unpack(x);
  auto [by, fy] = unpack(y);
  return base_->distance(bx, by) + (fx != fy ? 1 : 0);
}

Ball ProductSpace::ball(PointId x, std::int64_t r) const {
  require(x);
  auto [bx, fx] = unpack(x);
  const Ball inner = base_->ball(bx, r);
  Ball out;
  for (const auto& p : inner.points) {
    for (int f = 0; f < fiber_size_; ++f) {
      const std::int64_t d = p.distance + (f != fx ? 1 : 0);
      if (d <= r) out.points.push_back({pack(p.id, f), d});
    }
  }
  out.outside = inner.outside;
  if (r >= 1 && fiber_size_ > 1) {
    out.outside += base_->ball(bx, r - 1).outside * static_cast<std::uint64_t>(fiber_size_ - 1);
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const BallPoint& a, const BallPoint& b) { return a.id < b.id; });
  return out;
}

std::uint64_t ProductSpace::ball_bound(std::int64_t r) const {
  if (r < 1) return 1;
  return base_->ball_bound(r) + base_->ball_bound(r - 1) * static_cast<std::uint64_t>(fiber_size_ - 1);
}

std::string ProductSpace::label(PointId x) const {
  require(x);
  auto [y, f] = unpack(x);
  return base_->label(y) + "|" + std::to_string(f);
}

PointId ProductSpace::parse_label(std::string_view text) const {
  const auto bar = text.rfind('|');
  if (bar == std::string_view::npos) throw Error("product label needs '|': " + std::string(text));
  int f = 0;
  auto tail = text.substr(bar + 1);
  auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), f);
  if (ec != std::errc{} || ptr != tail.data() + tail.size()) {
    throw Error("bad fiber label: " + std::string(text));
  }
  return pack(base_->parse_label(text.substr(0, bar)), f);
}

// ---------------------------------------------------------------------------
// construction

SpacePtr make_space(const SpaceSpec& spec) {
  if (spec.radius < 1) throw Error("working-region radius must be >= 1");
  return std::visit(
      [&](const auto& shape) -> SpacePtr {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, LatticeShape>) {
          return std::make_shared<LatticeSpace>(shape.dimension, spec.radius, shape.metric);
        } else if constexpr (std::is_same_v<T, TreeShape>) {
          return std::make_shared<RootedTreeSpace>(shape.branching, spec.radius);
        } else if constexpr (std::is_same_v<T, FreeGroupShape>) {
          return std::make_shared<FreeGroupSpace>(shape.rank, spec.radius);
        } else {
          return std::make_shared<GraphSpace>(shape, spec.radius);
        }
      },
      spec.shape);
}

namespace {

int parse_suffix(std::string_view text, std::string_view prefix, int fallback, int minimum) {
  auto rest = text.substr(prefix.size());
  if (!rest.empty() && rest.front() == ':') rest.remove_prefix(1);
  if (rest.empty()) return fallback;
  int value = 0;
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), value);
  if (ec != std::errc{} || ptr != rest.data() + rest.size()) {
    throw Error("malformed space description: " + std::string(text));
  }
  if (value < minimum) {
    throw Error("space description " + std::string(text) + " needs a parameter >= " + std::to_string(minimum));
  }
  return value;
}

}  // namespace

SpaceSpec parse_space_spec(std::string_view text, std::int64_t radius, std::int64_t graph_basepoint,
                           LatticeMetric metric) {
  SpaceSpec spec;
  spec.radius = radius;
  if (text.starts_with("file:")) {
    const std::string path(text.substr(5));
    std::ifstream in(path);
    if (!in) throw Error("cannot open edge list " + path);
    spec.shape = read_edge_list(in, graph_basepoint);
  } else if (text.starts_with("tree")) {
    spec.shape = TreeShape{parse_suffix(text, "tree", 2, 2)};
  } else if (text.starts_with("free")) {
    spec.shape = FreeGroupShape{parse_suffix(text, "free", 2, 1)};
  } else if (text.starts_with("z")) {
    spec.shape = LatticeShape{parse_suffix(text, "z", 1, 1), metric};
  } else {
    throw Error("unknown space: " + std::string(text) + " (expected z<d>, tree<b>, free<r>, file:<path>)");
  }
  return spec;
}

GraphSpec read_edge_list(std::istream& in, std::int64_t basepoint) {
  GraphSpec spec;
  spec.basepoint = basepoint;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (tokens.size() != 2) {
      throw Error("edge list line " + std::to_string(lineno) + ": expected two vertex ids");
    }
    std::int64_t ends[2];
    for (int i = 0; i < 2; ++i) {
      const auto& tok = tokens[static_cast<std::size_t>(i)];
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), ends[i]);
      if (ec != std::errc{} || ptr != tok.data() + tok.size() || ends[i] < 0) {
        throw Error("edge list line " + std::to_string(lineno) + ": bad vertex id '" + tok + "'");
      }
    }
    spec.edges.emplace_back(ends[0], ends[1]);
  }
  return spec;
}

}  // namespace wobblelab
