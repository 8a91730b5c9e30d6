#include "wobblelab/serialize.hpp"

#include <cstdio>
#include <ostream>

namespace wobblelab {

namespace {

Json optional_number(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

std::string csv_cell(const Table::Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          if (v.find_first_of(",\"\n") == std::string::npos) return v;
          std::string quoted = "\"";
          for (char c : v) {
            if (c == '"') quoted += '"';
            quoted += c;
          }
          return quoted + "\"";
        } else {
          return std::to_string(v);
        }
      },
      cell);
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json to_json(const CapacityReport& report) {
  const Classification& c = report.classification;
  Json fits = Json::array();
  for (const auto& f : c.fits) {
    fits.push_back({{"model", to_string(f.model)},
                    {"first", f.first},
                    {"second", f.second},
                    {"rss", f.rss},
                    {"eligible", f.eligible}});
  }
  return {{"space", report.space},
          {"R", report.jump},
          {"radii", report.radii},
          {"cap_values", report.cap_values},
          {"residuals", report.residuals},
          {"iterations", report.iterations},
          {"classification", to_string(c.label)},
          {"preferred_model", c.preferred ? Json(to_string(*c.preferred)) : Json(nullptr)},
          {"extrapolated_limit", optional_number(c.extrapolated_limit)},
          {"fits", fits},
          {"note", c.note}};
}

void write_csv(std::ostream& out, const CapacityReport& report) {
  const Classification& c = report.classification;
  out << "radius,cap_value,residual,iterations,classification,extrapolated_limit\n";
  for (std::size_t i = 0; i < report.radii.size(); ++i) {
    out << report.radii[i] << ',' << format_double(report.cap_values[i]) << ','
        << format_double(report.residuals[i]) << ',' << report.iterations[i] << ',' << to_string(c.label) << ','
        << (c.extrapolated_limit ? format_double(*c.extrapolated_limit) : "") << '\n';
  }
}

Json to_json(const EscapeEstimate& e) {
  return {{"estimate", e.estimate}, {"ci95", e.ci95},       {"trials", e.trials},   {"horizon", e.horizon},
          {"escapes", e.escapes},   {"exits", e.exits},     {"returns", e.returns}, {"isolated", e.isolated}};
}

Json to_json(const Wobble& w) {
  const Space& s = *w.space();
  Json moved = Json::object();
  for (auto [x, y] : w.moved()) moved[s.label(x)] = s.label(y);
  return {{"space", s.describe()}, {"norm", w.norm()}, {"moved", moved}};
}

Wobble wobble_from_json(const Json& j, SpacePtr space) {
  if (!j.is_object() || !j.contains("moved") || !j.contains("norm")) {
    throw Error("wobble JSON needs 'moved' and 'norm'");
  }
  std::vector<Wobble::Pair> table;
  for (const auto& [from, to] : j.at("moved").items()) {
    table.emplace_back(space->parse_label(from), space->parse_label(to.get<std::string>()));
  }
  Wobble w = Wobble::from_table(space, table);
  if (w.moved().size() != table.size()) throw Error("wobble JSON does not describe a bijection of its support");
  const auto declared = j.at("norm").get<std::int64_t>();
  if (declared != w.norm()) {
    throw Error("wobble JSON declares norm " + std::to_string(declared) + " but the table has norm " +
                std::to_string(w.norm()));
  }
  return w;
}

Json to_json(const CoarseMap& q, bool with_table) {
  Json out = {{"source", q.source->describe()},
              {"target", q.target->describe()},
              {"r_check", q.r_check},
              {"phi_plus", q.phi_plus},
              {"phi_minus", q.phi_minus},
              {"fiber_bound", q.fiber_bound},
              {"injective", q.injective}};
  if (with_table) {
    Json table = Json::object();
    for (auto [x, y] : q.table) table[q.source->label(x)] = q.target->label(y);
    out["table"] = table;
  }
  return out;
}

Json to_json(const CoverageReport& r) {
  return {{"classes", r.class_count},
          {"square_degree", r.square_degree},
          {"k", r.k},
          {"generators", r.generator_count},
          {"max_generator_norm", r.max_generator_norm},
          {"interior_edges", r.interior_edges},
          {"min_interior_witnesses", r.min_interior_witnesses},
          {"boundary_edges", r.boundary_edges},
          {"boundary_uncovered", r.boundary_uncovered},
          {"violations", r.violations},
          {"ok", r.ok()}};
}

Json to_json(const Table& table) {
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < table.columns.size() && i < row.size(); ++i) {
      std::visit([&](const auto& v) { obj[table.columns[i]] = v; }, row[i]);
    }
    rows.push_back(std::move(obj));
  }
  return rows;
}

void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
}

}  // namespace wobblelab
