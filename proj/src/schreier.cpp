#include <algorithm>
#include <unordered_map>

#include "wobblelab/wobble.hpp"

namespace wobblelab {

namespace {

/// Vertices at graph distance 1 or 2 from `x`, collected with a stamp array
/// so repeated calls stay linear in the neighbourhood size.
class SquareNeighbourhood {
 public:
  explicit SquareNeighbourhood(const RBallGraph& g) : g_(g), stamp_(g.vertex_count(), kNever) {}

  const std::vector<std::size_t>& of(std::size_t x) {
    out_.clear();
    stamp_[x] = x;
    for (std::uint32_t y : g_.neighbors(x)) {
      if (stamp_[y] != x) {
        stamp_[y] = x;
        out_.push_back(y);
      }
      for (std::uint32_t z : g_.neighbors(y)) {
        if (stamp_[z] != x) {
          stamp_[z] = x;
          out_.push_back(z);
        }
      }
    }
    return out_;
  }

 private:
  static constexpr std::size_t kNever = static_cast<std::size_t>(-1);
  const RBallGraph& g_;
  std::vector<std::size_t> stamp_;
  std::vector<std::size_t> out_;
};

}  // namespace

SchreierGenSet schreier_generators(const RBallGraph& g) {
  const std::size_t n = g.vertex_count();
  SchreierGenSet s;
  s.color.assign(n, 0);

  // greedy colouring of G^2 in id order
  SquareNeighbourhood square(g);
  std::vector<std::size_t> used;
  for (std::size_t x = 0; x < n; ++x) {
    const auto& near = square.of(x);
    s.square_degree = std::max(s.square_degree, near.size());
    used.clear();
    for (std::size_t y : near) {
      if (y < x) used.push_back(s.color[y]);
    }
    std::sort(used.begin(), used.end());
    std::size_t c = 0;
    for (std::size_t u : used) {
      if (u == c) {
        ++c;
      } else if (u > c) {
        break;
      }
    }
    s.color[x] = c;
    if (c >= s.classes.size()) s.classes.resize(c + 1);
    s.classes[c].push_back(x);
  }

  for (std::size_t x = 0; x < n; ++x) {
    if (g.interior(x)) s.k = std::max(s.k, g.degree(x));
  }
  s.neighbor_maps.resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    const auto nb = g.neighbors(x);  // ascending index, hence ascending id
    auto& seq = s.neighbor_maps[x];
    for (std::size_t j = 0; j < s.k; ++j) seq.push_back(j < nb.size() ? nb[j] : x);
  }

  for (const auto& members : s.classes) {
    for (std::size_t j = 0; j < s.k; ++j) {
      std::vector<Wobble::Pair> swaps;
      for (std::size_t x : members) {
        const std::size_t y = s.neighbor_maps[x][j];
        if (y != x) swaps.emplace_back(g.vertex(x), g.vertex(y));
      }
      s.generators.push_back(Wobble::from_transpositions(g.space(), swaps));
    }
  }
  return s;
}

CoverageReport schreier_coverage_check(const SchreierGenSet& s, const RBallGraph& g) {
  const std::size_t n = g.vertex_count();
  const SpacePtr& space = g.space();
  CoverageReport report;
  report.class_count = s.classes.size();
  report.k = s.k;
  report.generator_count = s.generators.size();
  auto edge_name = [&](std::size_t a, std::size_t b) {
    return "{" + space->label(g.vertex(a)) + ", " + space->label(g.vertex(b)) + "}";
  };

  // the classes partition the vertex set
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> class_of(n, kNone);
  for (std::size_t i = 0; i < s.classes.size(); ++i) {
    for (std::size_t x : s.classes[i]) {
      if (x >= n || class_of[x] != kNone) {
        report.violations.push_back("classes do not partition the vertex set");
        return report;
      }
      class_of[x] = i;
    }
  }
  if (std::find(class_of.begin(), class_of.end(), kNone) != class_of.end()) {
    report.violations.push_back("some vertex belongs to no class");
    return report;
  }

  SquareNeighbourhood square(g);
  for (std::size_t x = 0; x < n; ++x) {
    const auto& near = square.of(x);
    report.square_degree = std::max(report.square_degree, near.size());
    for (std::size_t y : near) {
      if (y > x && class_of[y] == class_of[x]) {
        report.violations.push_back("class " + std::to_string(class_of[x]) + " holds " + edge_name(x, y) +
                                    " at graph distance <= 2");
      }
    }
  }
  if (report.class_count > report.square_degree + 1) {
    report.violations.push_back(std::to_string(report.class_count) + " classes exceed max degree of G^2 plus one (" +
                                std::to_string(report.square_degree + 1) + ")");
  }

  // the intended swap pairs of each generator are disjoint
  if (s.neighbor_maps.size() == n) {
    std::vector<std::size_t> stamp(n, kNone);
    for (std::size_t i = 0; i < s.classes.size(); ++i) {
      for (std::size_t j = 0; j < s.k; ++j) {
        const std::size_t tag = i * s.k + j;
        for (std::size_t x : s.classes[i]) {
          const std::size_t y = s.neighbor_maps[x].at(j);
          if (y == x) continue;
          if (stamp[x] == tag || stamp[y] == tag) {
            report.violations.push_back("swap pairs of s(" + std::to_string(i) + "," + std::to_string(j) +
                                        ") overlap at " + edge_name(x, y));
          }
          stamp[x] = stamp[y] = tag;
        }
      }
    }
  } else {
    report.violations.push_back("neighbour maps do not cover the vertex set");
  }

  std::unordered_map<std::uint64_t, std::size_t> edge_slot;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::uint32_t b : g.neighbors(a)) {
      if (b <= a) continue;
      edge_slot.emplace(static_cast<std::uint64_t>(a) * n + b, report.edges.size());
      report.edges.push_back({a, b, 0, g.interior(a) && g.interior(b)});
    }
  }

  for (std::size_t t = 0; t < s.generators.size(); ++t) {
    const Wobble& w = s.generators[t];
    report.max_generator_norm = std::max(report.max_generator_norm, w.norm());
    if (!w.is_involution()) report.violations.push_back("generator " + std::to_string(t) + " is not an involution");
    if (!compose(w, w).is_identity()) {
      report.violations.push_back("generator " + std::to_string(t) + " squared is not the identity");
    }
    if (w.norm() > g.jump()) {
      report.violations.push_back("generator " + std::to_string(t) + " has norm " + std::to_string(w.norm()) +
                                  " > R = " + std::to_string(g.jump()));
    }
    for (auto [x, y] : w.moved()) {
      if (!(x < y)) continue;
      const auto a = g.index_of(x);
      const auto b = g.index_of(y);
      if (!a || !b) continue;
      auto it = edge_slot.find(static_cast<std::uint64_t>(*a) * n + *b);
      if (it != edge_slot.end()) ++report.edges[it->second].witnesses;
    }
  }

  bool first_interior = true;
  for (const auto& e : report.edges) {
    if (e.interior) {
      ++report.interior_edges;
      report.min_interior_witnesses =
          first_interior ? e.witnesses : std::min(report.min_interior_witnesses, e.witnesses);
      first_interior = false;
      if (e.witnesses < 2) {
        report.violations.push_back("interior edge " + edge_name(e.a, e.b) + " realized by " +
                                    std::to_string(e.witnesses) + " generator(s)");
      }
    } else {
      ++report.boundary_edges;
      if (e.witnesses == 0) ++report.boundary_uncovered;
    }
  }
  return report;
}

}  // namespace wobblelab
