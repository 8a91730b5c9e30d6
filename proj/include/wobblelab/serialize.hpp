#pragma once

// JSON and CSV forms of the computed artifacts. JSON objects keep their keys
// in a fixed order and doubles are written in shortest round-trip form, so
// equal values always produce equal bytes. CSV doubles use 17 significant
// digits.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wobblelab/embeddings.hpp"
#include "wobblelab/potential.hpp"
#include "wobblelab/wobble.hpp"

namespace wobblelab {

using Json = nlohmann::ordered_json;

std::string format_double(double x);

/// Keys: space, R, radii, cap_values, residuals, iterations, classification,
/// preferred_model, extrapolated_limit, fits, note.
Json to_json(const CapacityReport& report);
/// One row per radius.
void write_csv(std::ostream& out, const CapacityReport& report);

Json to_json(const EscapeEstimate& e);

/// Keys: space, norm, moved (label -> label).
Json to_json(const Wobble& w);
/// Rebuilds the wobble and checks the declared norm.
Wobble wobble_from_json(const Json& j, SpacePtr space);

/// Keys: source, target, r_check, phi_plus, phi_minus, fiber_bound,
/// injective and, optionally, table (label -> label).
Json to_json(const CoarseMap& q, bool with_table = true);

Json to_json(const CoverageReport& report);

/// Rectangular diagnostics table.
struct Table {
  using Cell = std::variant<std::int64_t, double, std::string, bool>;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Array of objects, one per row.
Json to_json(const Table& table);
void write_csv(std::ostream& out, const Table& table);

}  // namespace wobblelab
