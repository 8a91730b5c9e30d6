#pragma once

// Elementary tensors in L^2({0,1}^X) for the uniform product measure, and the
// closed-form quantities the almost-invariance arguments need: inner products
// against permuted copies, the cylinder mass at a point, and the log ratio
// controlling the Ozawa vector xi(B) = prod_{x in B} a(x).
//
// Products over many coordinates are accumulated as sums of logarithms.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "wobblelab/spaces.hpp"
#include "wobblelab/wobble.hpp"

namespace wobblelab {

/// Per-coordinate function: value u at omega_x = 0 and v at omega_x = 1.
struct Factor {
  double u = 1.0;
  double v = 1.0;

  double mass() const noexcept { return (u * u + v * v) / 2.0; }
  friend bool operator==(const Factor&, const Factor&) = default;
};

/// Product vector prod_x f_x(omega_x). Listed coordinates carry their own
/// factors; every other coordinate carries `background`. Only ratios of
/// products matter, so a background of (1, 0) is allowed even though its
/// infinite product has zero norm.
class ProductVector {
 public:
  using Entry = std::pair<PointId, Factor>;

  ProductVector(SpacePtr space, std::vector<Entry> factors, Factor background = {}, double tail_bound = 0.0);

  const SpacePtr& space() const noexcept { return space_; }
  const std::vector<Entry>& factors() const noexcept { return factors_; }
  Factor background() const noexcept { return background_; }
  Factor factor(PointId x) const;
  /// Certified bound on the log-norm mass dropped by truncating the support.
  double tail_bound() const noexcept { return tail_bound_; }
  /// sum over listed coordinates of log((u^2 + v^2) / 2)
  double log_norm_squared() const;

 private:
  SpacePtr space_;
  std::vector<Entry> factors_;  // sorted by point
  Factor background_;
  double tail_bound_;
};

/// Smallest window W such that the factors of the jm family beyond |j| > W
/// carry less than `target` of log-norm, and that bound.
std::pair<std::int64_t, double> jm_window(double n, double target = 1e-12);

/// f_n(omega) = exp(-n sum_j omega_j exp(-|j|/n)) on the one-dimensional
/// lattice: factors (1, exp(-n exp(-|j|/n))) for |j| <= window.
ProductVector jm_profile(const SpacePtr& line, double n, std::optional<std::int64_t> window = std::nullopt);

/// <g.f, f> / ||f||^2 with (g.f)(omega) = f(omega o g).
double normalized_inner(const ProductVector& f, const Wobble& g);
/// Same quantity in the log domain.
double log_normalized_inner(const ProductVector& f, const Wobble& g);

/// || g.f/||f|| - f/||f|| ||_2
double defect(const ProductVector& f, const Wobble& g);

/// || f chi_A ||^2 / ||f||^2 for the cylinder A = {omega_x0 = 0}.
double cylinder_mass(const ProductVector& f, PointId x0);

/// Finitely supported a : X -> [0, 1] with a(x0) = 1.
class FiniteProfile {
 public:
  using Entry = std::pair<PointId, double>;

  FiniteProfile(SpacePtr space, PointId basepoint, std::vector<Entry> values);

  const SpacePtr& space() const noexcept { return space_; }
  PointId basepoint() const noexcept { return basepoint_; }
  const std::vector<Entry>& values() const noexcept { return values_; }
  double operator()(PointId x) const;

 private:
  SpacePtr space_;
  PointId basepoint_;
  std::vector<Entry> values_;  // sorted, nonzero
};

struct OzawaRatio {
  double lhs = 0.0;  // log(<xi, xi> / <g.xi, xi>)
  double rhs = 0.0;  // ||a - g.a||^2 / 2
};

OzawaRatio ozawa_log_ratio(const FiniteProfile& a, const Wobble& g);

/// Elementary tensor with factors (1, a(x)) everywhere, so that its
/// normalized inner product under g equals exp(-lhs) of ozawa_log_ratio.
ProductVector profile_to_product(const FiniteProfile& a);

}  // namespace wobblelab
