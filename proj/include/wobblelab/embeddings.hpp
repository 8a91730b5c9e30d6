#pragma once

// Tabulated maps between spaces with exhaustively verified control
// functions, the fiber lift of wobbles into Y x F, and the embedding of the
// binary tree into the free group.

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wobblelab/spaces.hpp"
#include "wobblelab/wobble.hpp"

namespace wobblelab {

struct CoarseMap {
  SpacePtr source;
  SpacePtr target;
  std::vector<std::pair<PointId, PointId>> table;  // total on the source region, sorted
  std::int64_t r_check = 0;
  /// phi_plus[r] = max d_Y(qx, qx') over pairs with d_X(x, x') <= r
  std::vector<std::int64_t> phi_plus;
  /// phi_minus[r] = min d_Y(qx, qx') over pairs with r <= d_X(x, x') <= r_check
  std::vector<std::int64_t> phi_minus;
  std::size_t fiber_bound = 0;  // K = max |q^{-1}(y)|
  bool injective = false;

  PointId operator()(PointId x) const;
  /// Lipschitz with constant c on pairs up to r_check: phi_plus[r] <= c r.
  bool lipschitz(std::int64_t c) const noexcept;
};

/// Scans every source pair within distance r_check.
CoarseMap check_coarse_map(std::vector<std::pair<PointId, PointId>> table, SpacePtr source, SpacePtr target,
                           std::int64_t r_check);

/// q~(x) = (q(x), f(x)) with fibre labels chosen greedily (smallest label
/// unused in the fibre, scanning source ids in order), and the induced
/// embedding W(X) -> W(Y x F).
class FiberLift {
 public:
  FiberLift(const CoarseMap& q, int fiber_size);

  const std::shared_ptr<const ProductSpace>& space() const noexcept { return space_; }
  SpacePtr space_ptr() const { return space_; }
  int label(PointId x) const;
  PointId lift_point(PointId x) const;
  /// Acts as q~ g q~^{-1} on q~(X) and as the identity elsewhere.
  Wobble lift(const Wobble& g) const;

 private:
  std::size_t slot(PointId x) const;

  SpacePtr source_;
  std::vector<std::pair<PointId, PointId>> table_;
  std::shared_ptr<const ProductSpace> space_;
  std::vector<int> labels_;  // parallel to table_
};

struct EnergyTransfer {
  std::int64_t radius = 0;        // R on the source
  std::int64_t target_radius = 0;  // R' = phi_plus(R)
  double source_energy = 0.0;     // sum over source pairs with d_X <= R of |f(qx) - f(qx')|^2
  double target_energy = 0.0;     // sum over target pairs with d_Y <= R' of |f(y) - f(y')|^2
  double bound = 0.0;             // K^2 * target_energy
  bool holds() const noexcept { return source_energy <= bound * (1.0 + 1e-12) + 1e-12; }
};

/// Pulls a finitely supported f on the target back along q and compares the
/// energies; target pairs leaving the region count with f = 0 outside.
EnergyTransfer energy_transfer(const CoarseMap& q, const std::unordered_map<PointId, double>& f, std::int64_t radius);

/// Binary tree of the given depth into the free group: a binary word maps to
/// the positive word with 0 -> a and 1 -> b. Checked on all pairs.
CoarseMap tree_into_free_group(std::int64_t depth, const std::shared_ptr<const FreeGroupSpace>& target);

/// Subgraph of the target's graph induced on the image of q, as a graph
/// space rooted at q(source basepoint).
std::shared_ptr<const GraphSpace> image_subgraph(const CoarseMap& q);

}  // namespace wobblelab
