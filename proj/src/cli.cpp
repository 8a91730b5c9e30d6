#include "wobblelab/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "wobblelab/bernoulli.hpp"
#include "wobblelab/embeddings.hpp"
#include "wobblelab/potential.hpp"
#include "wobblelab/random.hpp"
#include "wobblelab/serialize.hpp"
#include "wobblelab/wobble.hpp"

namespace wobblelab {

namespace {

struct RunConfig {
  std::string command;
  std::string space = "z1";
  std::string basepoint;
  std::int64_t jump = 1;
  std::string radii = "10,100,1000";
  bool radii_given = false;
  std::int64_t nmax = 0;  // 0: sized to the task
  std::string metric = "l1";
  std::int64_t horizon = 10000;
  std::int64_t trials = 0;  // 0: per-command default
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string output;
  std::string format = "json";
  std::string n;
  std::int64_t depth = 12;
  std::int64_t points = 20;
};

struct Artifact {
  Json json;
  std::string csv;
  std::string summary;
  std::vector<std::string> warnings;
  std::vector<std::string> violations;
};

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
  std::vector<T> out;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    std::string_view item = rest.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    T value{};
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
      throw Error(std::string("bad value '") + std::string(item) + "' in " + flag);
    }
    out.push_back(value);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  if (out.empty()) throw Error(std::string(flag) + " needs at least one value");
  return out;
}

bool is_file_space(const RunConfig& c) { return c.space.rfind("file:", 0) == 0; }

SpaceSpec base_spec(const RunConfig& c) {
  std::int64_t graph_base = 0;
  if (is_file_space(c) && !c.basepoint.empty()) graph_base = parse_list<std::int64_t>(c.basepoint, "--basepoint")[0];
  return parse_space_spec(c.space, 1, graph_base, c.metric == "linf" ? LatticeMetric::linf : LatticeMetric::l1);
}

struct Region {
  SpacePtr space;
  PointId x0;
};

/// Working region large enough to hold B(x0, reach), unless --nmax fixes it.
Region region_for(const RunConfig& c, std::int64_t reach) {
  SpaceSpec spec = base_spec(c);
  spec.radius = c.nmax > 0 ? c.nmax : reach;
  SpacePtr space = make_space(spec);
  if (c.basepoint.empty() || is_file_space(c)) {
    return {space, c.basepoint.empty() ? space->basepoint() : space->parse_label(c.basepoint)};
  }
  if (c.nmax > 0) return {space, space->parse_label(c.basepoint)};
  // grow the region until it holds x0, then make room for the ball around it
  for (std::int64_t r = reach;; r *= 2) {
    spec.radius = r;
    space = make_space(spec);
    try {
      const PointId x0 = space->parse_label(c.basepoint);
      spec.radius = reach + space->distance(space->basepoint(), x0);
      space = make_space(spec);
      return {space, space->parse_label(c.basepoint)};
    } catch (const OutOfRegionError&) {
      if (r > (std::int64_t{1} << 40)) throw;
    }
  }
}

/// Largest region whose point ids fit comfortably in 64 bits.
std::int64_t id_limit(const SpaceSpec& spec) {
  constexpr std::int64_t kHuge = std::int64_t{1} << 40;
  return std::visit(
      [](const auto& shape) -> std::int64_t {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, LatticeShape>) {
          const double side = std::pow(2.0, 62.0 / shape.dimension);
          return static_cast<std::int64_t>((side - 1.0) / 2.0) - 1;
        } else if constexpr (std::is_same_v<T, TreeShape>) {
          return static_cast<std::int64_t>(61.0 / std::log2(static_cast<double>(shape.branching))) - 2;
        } else if constexpr (std::is_same_v<T, FreeGroupShape>) {
          if (shape.rank == 1) return kHuge;
          return static_cast<std::int64_t>(60.0 / std::log2(2.0 * shape.rank - 1.0)) - 2;
        } else {
          return kHuge;
        }
      },
      spec.shape);
}

std::string count_violations(const Artifact& a) { return fmt::format("violations: {}", a.violations.size()); }

Artifact cmd_capacity(const RunConfig& c) {
  const auto radii = parse_list<std::int64_t>(c.radii, "--radii");
  const Region region = region_for(c, *std::max_element(radii.begin(), radii.end()));
  const CapacityReport report = capacity_profile(region.space, region.x0, c.jump, radii);

  Artifact a;
  a.warnings = region.space->warnings();
  for (std::size_t i = 0; i < report.cap_values.size(); ++i) {
    if (report.cap_values[i] < 0.0) a.violations.push_back(fmt::format("negative capacity at radius {}", radii[i]));
    if (i > 0 && report.cap_values[i] > report.cap_values[i - 1] + 1e-9) {
      a.violations.push_back(fmt::format("capacity increases from radius {} to {}", radii[i - 1], radii[i]));
    }
  }
  a.json = to_json(report);
  a.json["x0"] = region.space->label(region.x0);
  a.json["violations"] = a.violations;
  std::ostringstream csv;
  write_csv(csv, report);
  a.csv = csv.str();
  a.summary = fmt::format("capacity on {} (R={}): {}; {}", report.space, c.jump,
                          to_string(report.classification.label), count_violations(a));
  return a;
}

Artifact cmd_walk(const RunConfig& c) {
  SpaceSpec spec = base_spec(c);
  std::int64_t radius = c.nmax;
  if (radius <= 0) {
    const std::int64_t reach = c.horizon > (std::int64_t{1} << 40) / c.jump ? (std::int64_t{1} << 40) : c.horizon * c.jump;
    radius = std::max<std::int64_t>(1, std::min(reach, id_limit(spec)));
  }
  spec.radius = radius;
  const SpacePtr space = make_space(spec);
  const PointId x0 = c.basepoint.empty() ? space->basepoint() : space->parse_label(c.basepoint);
  const std::int64_t trials = c.trials > 0 ? c.trials : 10000;
  const EscapeEstimate e = mc_escape_probability(*space, x0, c.jump, c.horizon, trials, c.seed, c.threads);

  Artifact a;
  a.warnings = space->warnings();
  if (e.exits > 0) {
    a.warnings.push_back(fmt::format("{} walks left the working region (counted as escapes); raise --nmax", e.exits));
  }
  if (e.isolated) a.warnings.push_back("start point has no neighbours within R; estimate is 0");
  if (!(e.estimate >= 0.0 && e.estimate <= 1.0)) a.violations.push_back("estimate outside [0, 1]");
  a.json = {{"space", space->describe()}, {"x0", space->label(x0)}, {"R", c.jump}, {"seed", c.seed}};
  a.json.update(to_json(e));
  a.json["violations"] = a.violations;
  Table t{{"space", "R", "horizon", "trials", "seed", "estimate", "ci95", "escapes", "exits", "returns"}, {}};
  t.rows.push_back({space->describe(), c.jump, e.horizon, e.trials, static_cast<std::int64_t>(c.seed), e.estimate,
                    e.ci95, e.escapes, e.exits, e.returns});
  std::ostringstream csv;
  write_csv(csv, t);
  a.csv = csv.str();
  a.summary = fmt::format("walk on {} (R={}): escape {:.5f} +/- {:.5f}; {}", space->describe(), c.jump, e.estimate,
                          e.ci95, count_violations(a));
  return a;
}

Artifact cmd_schreier(const RunConfig& c) {
  const std::int64_t n = c.n.empty() ? 30 : parse_list<std::int64_t>(c.n, "--n").at(0);
  const Region region = region_for(c, n);
  const RBallGraph g = build_rball_graph(region.space, region.x0, n, c.jump);
  const SchreierGenSet s = schreier_generators(g);
  const CoverageReport report = schreier_coverage_check(s, g);
  const Space& space = *region.space;

  Artifact a;
  a.warnings = space.warnings();
  a.violations = report.violations;
  a.json = {{"space", space.describe()}, {"x0", space.label(region.x0)}, {"n", n},
            {"R", c.jump},               {"vertices", g.vertex_count()},   {"edges", g.edge_count()}};
  a.json.update(to_json(report));
  Table t{{"a", "b", "witnesses", "interior"}, {}};
  for (const auto& e : report.edges) {
    t.rows.push_back({space.label(g.vertex(e.a)), space.label(g.vertex(e.b)),
                      static_cast<std::int64_t>(e.witnesses), e.interior});
  }
  std::ostringstream csv;
  write_csv(csv, t);
  a.csv = csv.str();
  a.summary = fmt::format("schreier on {} (n={}, R={}): {} classes, k={}, {} generators, min interior witnesses {}; {}",
                          space.describe(), n, c.jump, report.class_count, report.k, report.generator_count,
                          report.min_interior_witnesses, count_violations(a));
  return a;
}

Artifact cmd_jmvec(const RunConfig& c) {
  auto ns = parse_list<double>(c.n.empty() ? "1,10,100,1000" : c.n, "--n");
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  std::int64_t widest = 0;
  for (double n : ns) widest = std::max(widest, jm_window(n).first);
  const std::int64_t m = widest + 1;
  const auto line = std::make_shared<const LatticeSpace>(1, m + 1);

  std::vector<Wobble::Pair> reversal;
  for (std::int64_t x = -5; x <= 5; ++x) reversal.emplace_back(line->point(x), line->point(-x));
  const std::vector<std::pair<std::string, Wobble>> family = {
      {"shift", cyclic_shift(line, m)},
      {"pair_swap", pair_swaps(line, -m, m)},
      {"block_reverse", Wobble::from_table(line, reversal)}};

  Artifact a;
  Table t{{"n", "wobble", "norm", "window", "tail_bound", "cylinder_mass", "expected_cylinder_mass",
           "normalized_inner", "defect"},
          {}};
  double previous_shift_defect = std::numeric_limits<double>::infinity();
  for (double n : ns) {
    const ProductVector f = jm_profile(line, n);
    const double mass = cylinder_mass(f, line->point(0));
    const double expected = 1.0 / (1.0 + std::exp(-2.0 * n));
    if (std::abs(mass - expected) > 1e-12) {
      a.violations.push_back(fmt::format("cylinder mass {} at n={} differs from {}", mass, n, expected));
    }
    for (const auto& [name, g] : family) {
      const double inner = normalized_inner(f, g);
      const double d = defect(f, g);
      if (inner > 1.0 + 1e-12) a.violations.push_back(fmt::format("inner product {} > 1 at n={}", inner, n));
      if (name == "shift") {
        if (!(d < previous_shift_defect)) {
          a.violations.push_back(fmt::format("shift defect does not decrease at n={}", n));
        }
        previous_shift_defect = d;
      }
      t.rows.push_back({n, name, g.norm(), static_cast<std::int64_t>(f.factors().size() / 2), f.tail_bound(), mass,
                        expected, inner, d});
    }
  }
  a.json = {{"rows", to_json(t)}, {"violations", a.violations}};
  std::ostringstream csv;
  write_csv(csv, t);
  a.csv = csv.str();
  a.summary = fmt::format("jmvec: {} values of n x {} wobbles; {}", ns.size(), family.size(), count_violations(a));
  return a;
}

Artifact cmd_ozawa(const RunConfig& c) {
  SpaceSpec spec = base_spec(c);
  spec.radius = c.nmax > 0 ? c.nmax : 30;
  const SpacePtr space = make_space(spec);
  const PointId x0 = c.basepoint.empty() ? space->basepoint() : space->parse_label(c.basepoint);
  const std::vector<PointId> pool = space->points();
  const std::int64_t trials = c.trials > 0 ? c.trials : 1000;
  const auto support = static_cast<std::size_t>(std::clamp<std::int64_t>(c.points, 1, static_cast<std::int64_t>(pool.size())));

  Artifact a;
  Table t{{"trial", "moved", "norm", "lhs", "rhs", "inner", "duality_error"}, {}};
  double max_gap = -std::numeric_limits<double>::infinity();
  double max_duality = 0.0;
  for (std::int64_t i = 0; i < trials; ++i) {
    auto rng = trial_stream(c.seed, static_cast<std::uint64_t>(i));
    std::vector<PointId> others;
    for (PointId p : pool) {
      if (p != x0) others.push_back(p);
    }
    std::vector<FiniteProfile::Entry> values{{x0, 1.0}};
    for (std::size_t k = 0; k + 1 < support && k < others.size(); ++k) {
      std::swap(others[k], others[k + uniform_below(rng, others.size() - k)]);
      values.emplace_back(others[k], uniform_unit(rng));
    }
    const FiniteProfile profile(space, x0, values);
    const Wobble g = random_wobble(space, pool, rng);
    const OzawaRatio r = ozawa_log_ratio(profile, g);
    const double inner = normalized_inner(profile_to_product(profile), g);
    const double duality = std::abs(std::exp(-r.lhs) - inner);
    max_gap = std::max(max_gap, r.lhs - r.rhs);
    max_duality = std::max(max_duality, duality);
    if (r.lhs > r.rhs + 1e-12) {
      a.violations.push_back(fmt::format("trial {}: lhs {} exceeds rhs {}", i, r.lhs, r.rhs));
    }
    if (duality > 1e-12) a.violations.push_back(fmt::format("trial {}: duality error {}", i, duality));
    t.rows.push_back({i, static_cast<std::int64_t>(g.moved().size()), g.norm(), r.lhs, r.rhs, inner, duality});
  }
  a.json = {{"space", space->describe()},
            {"trials", trials},
            {"seed", c.seed},
            {"support", support},
            {"max_lhs_minus_rhs", max_gap},
            {"max_duality_error", max_duality},
            {"violations", a.violations},
            {"rows", to_json(t)}};
  std::ostringstream csv;
  write_csv(csv, t);
  a.csv = csv.str();
  a.summary = fmt::format("ozawa: {} trials on {}; {}", trials, space->describe(), count_violations(a));
  return a;
}

Artifact cmd_embed(const RunConfig& c) {
  const std::int64_t depth = c.depth;
  if (depth < 1) throw Error("--depth must be >= 1");
  const auto target = std::make_shared<const FreeGroupSpace>(2, depth);
  const CoarseMap q = tree_into_free_group(depth, target);
  const auto image = image_subgraph(q);

  std::vector<std::int64_t> radii;
  if (c.radii_given) {
    radii = parse_list<std::int64_t>(c.radii, "--radii");
  } else {
    for (std::int64_t r : {depth / 3, 2 * depth / 3, depth}) {
      if (r >= 1 && (radii.empty() || r > radii.back())) radii.push_back(r);
    }
  }
  const CapacityReport report = capacity_profile(image, image->basepoint(), 1, radii);
  const std::int64_t matched = radii.back();
  if (matched > depth) throw Error("--radii must not exceed --depth");
  const auto tree = std::make_shared<const RootedTreeSpace>(2, depth);
  const double tree_cap = capacity_truncated(build_rball_graph(tree, tree->basepoint(), matched, 1), tree->basepoint()).capacity;
  const double ratio = report.cap_values.back() / tree_cap;

  Artifact a;
  if (!q.injective) a.violations.push_back("tree map is not injective");
  if (!q.lipschitz(1)) a.violations.push_back("tree map is not 1-Lipschitz");
  if (!(ratio >= 0.9)) a.violations.push_back(fmt::format("image capacity ratio {} below 0.9", ratio));
  if (report.classification.label != Recurrence::transient) {
    a.violations.push_back("image subgraph not classified transient");
  }
  a.json = {{"depth", depth},
            {"map", to_json(q)},
            {"image", {{"vertices", image->size()}, {"edges", image->edge_count()}}},
            {"capacity", to_json(report)},
            {"tree_capacity", tree_cap},
            {"ratio", ratio},
            {"violations", a.violations}};
  std::ostringstream csv;
  write_csv(csv, report);
  a.csv = csv.str();
  a.summary = fmt::format("embed: binary tree depth {} -> {}, injective={}, K={}, image {}, ratio {:.6f}; {}", depth,
                          target->describe(), q.injective, q.fiber_bound, to_string(report.classification.label),
                          ratio, count_violations(a));
  return a;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"wobblelab: capacities, wobbles and product vectors on bounded-geometry spaces"};
  app.name("wobblelab");
  app.set_config("--config", "", "flat key=value file; command-line flags override it");
  RunConfig c;
  app.add_option("--space", c.space, "z<d>, tree<b>, free<r> or file:<edge list>")->capture_default_str();
  app.add_option("--basepoint", c.basepoint, "start point label (graph files: vertex id)");
  app.add_option("--R", c.jump, "jump radius")->check(CLI::PositiveNumber)->capture_default_str();
  std::vector<std::string> radii_items;
  app.add_option("--radii", radii_items, "comma-separated truncation radii (default 10,100,1000)")->delimiter(',');
  app.add_option("--nmax", c.nmax, "working-region radius (default: sized to the task)");
  app.add_option("--metric", c.metric, "lattice metric")->check(CLI::IsMember({"l1", "linf"}))->capture_default_str();
  app.add_option("--horizon", c.horizon, "walk length")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--trials", c.trials, "number of random trials (walk: 10000, ozawa: 1000)");
  app.add_option("--seed", c.seed, "random seed")->capture_default_str();
  app.add_option("--threads", c.threads, "worker threads for walks (0: all cores)");
  app.add_option("--output", c.output, "write the artifact here instead of stdout");
  app.add_option("--format", c.format, "artifact format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  std::vector<std::string> n_items;
  app.add_option("--n", n_items, "schreier: ball radius (30); jmvec: comma-separated n values (1,10,100,1000)")
      ->delimiter(',');
  app.add_option("--depth", c.depth, "embed: binary tree depth")->capture_default_str();
  app.add_option("--points", c.points, "ozawa: profile support size")->capture_default_str();

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"capacity", "truncated capacities over radii with a recurrence classification"},
      {"walk", "Monte-Carlo escape probability of the R-ball walk"},
      {"schreier", "Schreier generator set of an R-ball graph and its coverage report"},
      {"jmvec", "cylinder mass and defect of the jm product vectors"},
      {"ozawa", "randomized checks of the Ozawa log-ratio inequality"},
      {"embed", "binary tree into the free group and the capacity of its image"}};
  for (const auto& [name, help] : commands) {
    app.add_subcommand(name, help)->fallthrough()->callback([&c, name = name] { c.command = name; });
  }
  app.require_subcommand(1, 1);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }
  auto join = [](const std::vector<std::string>& items) {
    std::string text;
    for (const auto& item : items) text += (text.empty() ? "" : ",") + item;
    return text;
  };
  c.radii_given = !radii_items.empty();
  if (c.radii_given) c.radii = join(radii_items);
  c.n = join(n_items);

  Artifact a;
  try {
    if (c.command == "capacity") {
      a = cmd_capacity(c);
    } else if (c.command == "walk") {
      a = cmd_walk(c);
    } else if (c.command == "schreier") {
      a = cmd_schreier(c);
    } else if (c.command == "jmvec") {
      a = cmd_jmvec(c);
    } else if (c.command == "ozawa") {
      a = cmd_ozawa(c);
    } else {
      a = cmd_embed(c);
    }
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kViolation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  const std::string text = c.format == "csv" ? a.csv : a.json.dump(2) + "\n";
  if (c.output.empty()) {
    out << text;
  } else {
    std::ofstream file(c.output, std::ios::binary);
    file << text;
    if (!file) {
      err << "error: cannot write " << c.output << '\n';
      return kUsage;
    }
  }
  for (const auto& w : a.warnings) err << "warning: " << w << '\n';
  for (const auto& v : a.violations) err << "violation: " << v << '\n';
  err << a.summary << '\n';
  return a.violations.empty() ? kSuccess : kViolation;
}

}  // namespace wobblelab
