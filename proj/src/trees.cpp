#include <algorithm>
#include <limits>

#include "wobblelab/random.hpp"
#include "wobblelab/spaces.hpp"

namespace wobblelab {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a > kSaturated - b ? kSaturated : a + b; }
std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  return (b != 0 && a > kSaturated / b) ? kSaturated : a * b;
}

// 1 + q + ... + q^m
std::uint64_t geometric(std::uint64_t q, std::int64_t m) {
  std::uint64_t total = 0, term = 1;
  for (std::int64_t s = 0; s <= m; ++s) {
    total = sat_add(total, term);
    term = sat_mul(term, q);
  }
  return total;
}

std::vector<std::int64_t> level_starts(std::uint64_t first, std::uint64_t growth, std::int64_t levels) {
  std::vector<std::int64_t> starts{0, 1};
  std::uint64_t width = first;
  for (std::int64_t k = 1; k < levels; ++k) {
    const auto next = static_cast<std::uint64_t>(starts.back()) + width;
    if (width > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()) ||
        next > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      throw Error("tree region too large for 64-bit point ids");
    }
    starts.push_back(static_cast<std::int64_t>(next));
    width = sat_mul(width, growth);
  }
  return starts;
}

std::int64_t level_of(const std::vector<std::int64_t>& starts, std::int64_t id) {
  return static_cast<std::int64_t>(std::upper_bound(starts.begin(), starts.end(), id) - starts.begin()) - 1;
}

struct Frame {
  std::int64_t id;
  std::int64_t level;
  std::int64_t dist;
  std::int64_t from;
};

// Traversal of a ball in a tree given arithmetic parent/children.
template <typename Parent, typename Children>
Ball tree_ball(std::int64_t center, std::int64_t center_level, std::int64_t r, std::int64_t max_level,
               std::uint64_t growth, Parent parent, Children children) {
  Ball out;
  std::vector<Frame> stack{{center, center_level, 0, -1}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    out.points.push_back({PointId{f.id}, f.dist});
    if (f.dist == r) continue;
    if (f.level > 0) {
      const std::int64_t p = parent(f.id, f.level);
      if (p != f.from) stack.push_back({p, f.level - 1, f.dist + 1, f.id});
    }
    children(f.id, f.level, [&](std::int64_t c) {
      if (c == f.from) return;
      if (f.level + 1 > max_level) {
        out.outside = sat_add(out.outside, geometric(growth, r - f.dist - 1));
      } else {
        stack.push_back({c, f.level + 1, f.dist + 1, f.id});
      }
    });
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const BallPoint& a, const BallPoint& b) { return a.id < b.id; });
  return out;
}

template <typename Parent>
std::int64_t tree_distance(std::int64_t x, std::int64_t lx, std::int64_t y, std::int64_t ly, Parent parent) {
  std::int64_t d = 0;
  while (lx > ly) x = parent(x, lx--), ++d;
  while (ly > lx) y = parent(y, ly--), ++d;
  while (x != y) {
    x = parent(x, lx--);
    y = parent(y, ly--);
    d += 2;
  }
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// RootedTreeSpace

namespace {

class RootedTreeWalker final : public Walker {
 public:
  RootedTreeWalker(const RootedTreeSpace& space, PointId start)
      : b_(space.branching()), max_depth_(space.radius()), start_(raw(start)), start_depth_(space.depth(start)) {}

  TrialOutcome run(std::int64_t horizon, std::mt19937_64& rng) const override {
    std::int64_t id = start_, depth = start_depth_;
    for (std::int64_t t = 0; t < horizon; ++t) {
      const std::uint64_t degree = id == 0 ? static_cast<std::uint64_t>(b_) : static_cast<std::uint64_t>(b_) + 1;
      const auto pick = static_cast<std::int64_t>(uniform_below(rng, degree));
      if (pick == b_) {
        id = (id - 1) / b_;
        --depth;
      } else {
        if (depth == max_depth_) return TrialOutcome::exited;
        id = b_ * id + 1 + pick;
        ++depth;
      }
      if (id == start_) return TrialOutcome::returned;
    }
    return TrialOutcome::escaped;
  }

 private:
  std::int64_t b_;
  std::int64_t max_depth_;
  std::int64_t start_;
  std::int64_t start_depth_;
};

constexpr char kDigits[] = "0123456789abcdefghijklmnopqrstuvwxyz";

}  // namespace

RootedTreeSpace::RootedTreeSpace(int branching, std::int64_t depth) : Space(depth, PointId{0}), branching_(branching) {
  if (branching < 2 || branching > 36) throw Error("tree branching must be in [2, 36]");
  if (depth < 1) throw Error("tree depth must be >= 1");
  const auto b = static_cast<std::uint64_t>(branching);
  level_start_ = level_starts(b, b, depth + 2);
}

std::string RootedTreeSpace::describe() const {
  return "tree" + std::to_string(branching_) + "[n=" + std::to_string(radius_) + "]";
}

bool RootedTreeSpace::contains(PointId x) const noexcept {
  return raw(x) >= 0 && raw(x) < level_start_[static_cast<std::size_t>(radius_ + 1)];
}

std::uint64_t RootedTreeSpace::size() const {
  return static_cast<std::uint64_t>(level_start_[static_cast<std::size_t>(radius_ + 1)]);
}

std::int64_t RootedTreeSpace::depth(PointId x) const {
  require(x);
  return level_of(level_start_, raw(x));
}

PointId RootedTreeSpace::parent(PointId x) const {
  require(x);
  if (raw(x) == 0) throw Error("the root has no parent");
  return PointId{(raw(x) - 1) / branching_};
}

PointId RootedTreeSpace::child(PointId x, int slot) const {
  if (slot < 0 || slot >= branching_) throw Error("child slot out of range");
  if (depth(x) >= radius_) throw OutOfRegionError("child below the truncation depth of " + describe());
  return PointId{branching_ * raw(x) + 1 + slot};
}

std::int64_t RootedTreeSpace::distance(PointId x, PointId y) const {
  require(x);
  require(y);
  const std::int64_t b = branching_;
  return tree_distance(raw(x), depth(x), raw(y), depth(y), [b](std::int64_t v, std::int64_t) { return (v - 1) / b; });
}

Ball RootedTreeSpace::ball(PointId x, std::int64_t r) const {
  require(x);
  const std::int64_t b = branching_;
  return tree_ball(
      raw(x), depth(x), r, radius_, static_cast<std::uint64_t>(b),
      [b](std::int64_t v, std::int64_t) { return (v - 1) / b; },
      [b](std::int64_t v, std::int64_t, auto&& visit) {
        for (std::int64_t c = 0; c < b; ++c) visit(b * v + 1 + c);
      });
}

std::uint64_t RootedTreeSpace::ball_bound(std::int64_t r) const {
  // deep vertices see a (b+1)-regular tree
  if (r < 1) return 1;
  const auto b = static_cast<std::uint64_t>(branching_);
  return sat_add(1, sat_mul(b + 1, geometric(b, r - 1)));
}

std::string RootedTreeSpace::label(PointId x) const {
  require(x);
  if (raw(x) == 0) return "e";
  std::string s;
  for (std::int64_t v = raw(x); v != 0; v = (v - 1) / branching_) s += kDigits[(v - 1) % branching_];
  std::reverse(s.begin(), s.end());
  return s;
}

PointId RootedTreeSpace::parse_label(std::string_view text) const {
  PointId x{0};
  if (text == "e") return x;
  if (text.empty()) throw Error("empty tree label");
  for (char ch : text) {
    const char* hit = std::find(kDigits, kDigits + branching_, ch);
    if (hit == kDigits + branching_) throw Error("bad tree label '" + std::string(text) + "'");
    x = child(x, static_cast<int>(hit - kDigits));
  }
  return x;
}

std::unique_ptr<Walker> RootedTreeSpace::walker(PointId start, std::int64_t jump) const {
  if (jump == 1) {
    require(start);
    return std::make_unique<RootedTreeWalker>(*this, start);
  }
  return Space::walker(start, jump);
}

// ---------------------------------------------------------------------------
// FreeGroupSpace

class FreeGroupWalker final : public Walker {
 public:
  FreeGroupWalker(const FreeGroupSpace& space, PointId start)
      : space_(space), q_(2 * space.rank() - 1), start_level_(space.length(start)) {
    start_index_ = raw(start) - space.level_start_[static_cast<std::size_t>(start_level_)];
  }

  TrialOutcome run(std::int64_t horizon, std::mt19937_64& rng) const override {
    const std::int64_t degree = q_ + 1;
    const std::int64_t max_level = space_.radius();
    std::int64_t level = start_level_, index = start_index_;
    for (std::int64_t t = 0; t < horizon; ++t) {
      const auto pick = static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(degree)));
      if (level == 0) {
        level = 1;
        index = pick;
      } else if (pick == q_) {
        index = level == 1 ? 0 : index / q_;
        --level;
      } else {
        if (level == max_level) return TrialOutcome::exited;
        index = index * q_ + pick;
        ++level;
      }
      if (level == start_level_ && index == start_index_) return TrialOutcome::returned;
    }
    return TrialOutcome::escaped;
  }

 private:
  const FreeGroupSpace& space_;
  std::int64_t q_;
  std::int64_t start_level_;
  std::int64_t start_index_ = 0;
};

FreeGroupSpace::FreeGroupSpace(int rank, std::int64_t radius) : Space(radius, PointId{0}), rank_(rank) {
  if (rank < 1 || rank > 26) throw Error("free group rank must be in [1, 26]");
  if (radius < 1) throw Error("free group ball radius must be >= 1");
  level_start_ = level_starts(static_cast<std::uint64_t>(2 * rank), static_cast<std::uint64_t>(2 * rank - 1),
                              radius + 2);
}

std::string FreeGroupSpace::describe() const {
  return "free" + std::to_string(rank_) + "[n=" + std::to_string(radius_) + "]";
}

std::int64_t FreeGroupSpace::slot_count(std::int64_t level) const noexcept {
  return level == 0 ? 2 * rank_ : 2 * rank_ - 1;
}

bool FreeGroupSpace::contains(PointId x) const noexcept {
  return raw(x) >= 0 && raw(x) < level_start_[static_cast<std::size_t>(radius_ + 1)];
}

std::uint64_t FreeGroupSpace::size() const {
  return static_cast<std::uint64_t>(level_start_[static_cast<std::size_t>(radius_ + 1)]);
}

std::int64_t FreeGroupSpace::length(PointId x) const {
  require(x);
  return level_of(level_start_, raw(x));
}

PointId FreeGroupSpace::parent(PointId x) const {
  const std::int64_t k = length(x);
  if (k == 0) throw Error("the identity has no parent");
  if (k == 1) return PointId{0};
  const std::int64_t i = raw(x) - level_start_[static_cast<std::size_t>(k)];
  return PointId{level_start_[static_cast<std::size_t>(k - 1)] + i / (2 * rank_ - 1)};
}

std::vector<int> FreeGroupSpace::word(PointId x) const {
  std::vector<int> slots;
  const std::int64_t q = 2 * rank_ - 1;
  for (std::int64_t k = length(x); k > 0; --k) {
    const std::int64_t i = raw(x) - level_start_[static_cast<std::size_t>(k)];
    slots.push_back(static_cast<int>(k == 1 ? i : i % q));
    x = parent(x);
  }
  std::reverse(slots.begin(), slots.end());
  std::vector<int> letters;
  for (int s : slots) {
    if (letters.empty()) {
      letters.push_back(s);
    } else {
      const int banned = inverse_letter(letters.back());
      letters.push_back(s < banned ? s : s + 1);
    }
  }
  return letters;
}

PointId FreeGroupSpace::multiply(PointId x, int letter) const {
  if (letter < 0 || letter >= 2 * rank_) throw Error("letter out of range");
  const std::int64_t k = length(x);
  if (k == 0) return PointId{1 + letter};
  const int last = word(x).back();
  const int banned = inverse_letter(last);
  if (letter == banned) return parent(x);
  if (k >= radius_) throw OutOfRegionError("word longer than the ball radius of " + describe());
  const std::int64_t i = raw(x) - level_start_[static_cast<std::size_t>(k)];
  const std::int64_t slot = letter < banned ? letter : letter - 1;
  return PointId{level_start_[static_cast<std::size_t>(k + 1)] + i * (2 * rank_ - 1) + slot};
}

std::int64_t FreeGroupSpace::distance(PointId x, PointId y) const {
  require(x);
  require(y);
  const std::int64_t q = 2 * rank_ - 1;
  const auto& starts = level_start_;
  return tree_distance(raw(x), length(x), raw(y), length(y), [&starts, q](std::int64_t v, std::int64_t level) {
    if (level == 1) return std::int64_t{0};
    return starts[static_cast<std::size_t>(level - 1)] + (v - starts[static_cast<std::size_t>(level)]) / q;
  });
}

Ball FreeGroupSpace::ball(PointId x, std::int64_t r) const {
  require(x);
  const std::int64_t q = 2 * rank_ - 1;
  const auto& starts = level_start_;
  return tree_ball(
      raw(x), length(x), r, radius_, static_cast<std::uint64_t>(q),
      [&starts, q](std::int64_t v, std::int64_t level) {
        if (level == 1) return std::int64_t{0};
        const std::int64_t i = v - starts[static_cast<std::size_t>(level)];
        return starts[static_cast<std::size_t>(level - 1)] + i / q;
      },
      [&starts, q, this](std::int64_t v, std::int64_t level, auto&& visit) {
        const std::int64_t i = v - starts[static_cast<std::size_t>(level)];
        const std::int64_t first = starts[static_cast<std::size_t>(level + 1)] + i * q;
        for (std::int64_t c = 0; c < slot_count(level); ++c) visit(first + c);
      });
}

std::uint64_t FreeGroupSpace::ball_bound(std::int64_t r) const {
  if (r < 1) return 1;
  const auto q = static_cast<std::uint64_t>(2 * rank_ - 1);
  return sat_add(1, sat_mul(static_cast<std::uint64_t>(2 * rank_), geometric(q, r - 1)));
}

std::string FreeGroupSpace::label(PointId x) const {
  const auto w = word(x);
  if (w.empty()) return "e";
  std::string s;
  for (int l : w) s += static_cast<char>((l & 1 ? 'A' : 'a') + l / 2);
  return s;
}

PointId FreeGroupSpace::parse_label(std::string_view text) const {
  PointId x{0};
  if (text == "e") return x;
  if (text.empty()) throw Error("empty free-group word");
  for (char ch : text) {
    int letter = -1;
    if (ch >= 'a' && ch < 'a' + rank_) letter = 2 * (ch - 'a');
    if (ch >= 'A' && ch < 'A' + rank_) letter = 2 * (ch - 'A') + 1;
    if (letter < 0) throw Error("bad free-group word '" + std::string(text) + "'");
    x = multiply(x, letter);
  }
  return x;
}

std::unique_ptr<Walker> FreeGroupSpace::walker(PointId start, std::int64_t jump) const {
  if (jump == 1) {
    require(start);
    return std::make_unique<FreeGroupWalker>(*this, start);
  }
  return Space::walker(start, jump);
}

}  // namespace wobblelab
