#include "wobblelab/bernoulli.hpp"

#include <algorithm>
#include <cmath>

namespace wobblelab {

namespace {

void check_factor(Factor f) {
  if (!(f.u >= 0.0) || !(f.v >= 0.0) || !std::isfinite(f.u) || !std::isfinite(f.v)) {
    throw Error("product-vector factors must be finite and nonnegative");
  }
  if (f.u * f.u + f.v * f.v <= 0.0) throw Error("product-vector factor (0, 0) makes the vector zero");
}

bool entry_less(const ProductVector::Entry& a, const ProductVector::Entry& b) { return a.first < b.first; }

}  // namespace

ProductVector::ProductVector(SpacePtr space, std::vector<Entry> factors, Factor background, double tail_bound)
    : space_(std::move(space)), factors_(std::move(factors)), background_(background), tail_bound_(tail_bound) {
  if (!space_) throw Error("product vector needs a space");
  check_factor(background_);
  std::sort(factors_.begin(), factors_.end(), entry_less);
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i > 0 && factors_[i - 1].first == factors_[i].first) throw Error("product vector lists a coordinate twice");
    if (!space_->contains(factors_[i].first)) throw OutOfRegionError("product-vector coordinate outside the region");
    check_factor(factors_[i].second);
  }
}

Factor ProductVector::factor(PointId x) const {
  auto it = std::lower_bound(factors_.begin(), factors_.end(), Entry{x, {}}, entry_less);
  return it != factors_.end() && it->first == x ? it->second : background_;
}

double ProductVector::log_norm_squared() const {
  double total = 0.0;
  for (const auto& [x, f] : factors_) total += std::log(f.mass());
  return total;
}

std::pair<std::int64_t, double> jm_window(double n, double target) {
  if (!(n > 0.0)) throw Error("jm profile needs n > 0");
  // log((1 + t^2) / 2) >= log t = -n e^{-|j|/n}, so the tail is a geometric series
  const double ratio_gap = -std::expm1(-1.0 / n);
  auto bound = [&](std::int64_t w) {
    return 2.0 * n * std::exp(-static_cast<double>(w + 1) / n) / ratio_gap;
  };
  auto w = static_cast<std::int64_t>(std::ceil(n * std::log(2.0 * n / (ratio_gap * target)))) - 1;
  w = std::max<std::int64_t>(w, 0);
  while (w > 0 && bound(w - 1) < target) --w;
  while (bound(w) >= target) ++w;
  return {w, bound(w)};
}

ProductVector jm_profile(const SpacePtr& line, double n, std::optional<std::int64_t> window) {
  const auto* z = dynamic_cast<const LatticeSpace*>(line.get());
  if (z == nullptr || z->dimension() != 1) throw Error("jm profile lives on the one-dimensional lattice");
  if (!(n > 0.0)) throw Error("jm profile needs n > 0");
  std::int64_t w = 0;
  double tail = 0.0;
  if (window) {
    if (*window < 0) throw Error("jm window must be >= 0");
    w = *window;
    tail = 2.0 * n * std::exp(-static_cast<double>(w + 1) / n) / -std::expm1(-1.0 / n);
  } else {
    std::tie(w, tail) = jm_window(n);
  }
  if (w > z->radius()) {
    throw OutOfRegionError("jm window " + std::to_string(w) + " exceeds the lattice region radius " +
                           std::to_string(z->radius()));
  }
  std::vector<ProductVector::Entry> factors;
  factors.reserve(static_cast<std::size_t>(2 * w + 1));
  for (std::int64_t j = -w; j <= w; ++j) {
    const double t = std::exp(-n * std::exp(-static_cast<double>(std::abs(j)) / n));
    factors.push_back({z->point(j), Factor{1.0, t}});
  }
  return ProductVector(line, std::move(factors), Factor{}, tail);
}

double log_normalized_inner(const ProductVector& f, const Wobble& g) {
  if (f.space() != g.space()) throw Error("product vector and wobble live on different spaces");
  std::vector<PointId> points;
  points.reserve(2 * f.factors().size());
  for (const auto& [x, _] : f.factors()) {
    points.push_back(x);
    points.push_back(g.apply(x));
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  double total = 0.0;
  for (PointId y : points) {
    const Factor a = f.factor(g.apply_inverse(y));
    const Factor b = f.factor(y);
    const double norm = b.u * b.u + b.v * b.v;
    const double cross = a.u * b.u + a.v * b.v;
    if (cross == 0.0) return -INFINITY;
    total += std::log1p((cross - norm) / norm);
  }
  return total;
}

double normalized_inner(const ProductVector& f, const Wobble& g) { return std::exp(log_normalized_inner(f, g)); }

double defect(const ProductVector& f, const Wobble& g) {
  const double log_inner = log_normalized_inner(f, g);
  if (log_inner > 1e-12) throw Error("normalized inner product exceeds 1: numerical fault");
  return std::sqrt(std::max(0.0, -2.0 * std::expm1(log_inner)));
}

double cylinder_mass(const ProductVector& f, PointId x0) {
  if (!f.space()->contains(x0)) throw OutOfRegionError("cylinder point outside the region");
  const Factor a = f.factor(x0);
  return a.u * a.u / (a.u * a.u + a.v * a.v);
}

FiniteProfile::FiniteProfile(SpacePtr space, PointId basepoint, std::vector<Entry> values)
    : space_(std::move(space)), basepoint_(basepoint) {
  if (!space_) throw Error("profile needs a space");
  std::sort(values.begin(), values.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto [x, a] = values[i];
    if (i > 0 && values[i - 1].first == x) throw Error("profile lists a point twice");
    if (!(a >= 0.0 && a <= 1.0)) throw Error("profile values must lie in [0, 1]");
    if (!space_->contains(x)) throw OutOfRegionError("profile point outside the region");
    if (a > 0.0) values_.push_back(values[i]);
  }
  if ((*this)(basepoint_) != 1.0) throw Error("profile must equal 1 at its basepoint");
}

double FiniteProfile::operator()(PointId x) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), Entry{x, 0.0},
                             [](const Entry& a, const Entry& b) { return a.first < b.first; });
  return it != values_.end() && it->first == x ? it->second : 0.0;
}

OzawaRatio ozawa_log_ratio(const FiniteProfile& a, const Wobble& g) {
  if (a.space() != g.space()) throw Error("profile and wobble live on different spaces");
  OzawaRatio out;
  std::vector<PointId> points;
  for (const auto& [x, ax] : a.values()) {
    out.lhs += std::log1p(ax * ax) - std::log1p(ax * a(g.apply(x)));
    points.push_back(x);
    points.push_back(g.apply_inverse(x));
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  for (PointId x : points) {
    const double d = a(x) - a(g.apply(x));
    out.rhs += d * d;
  }
  out.rhs /= 2.0;
  return out;
}

ProductVector profile_to_product(const FiniteProfile& a) {
  std::vector<ProductVector::Entry> factors;
  for (const auto& [x, ax] : a.values()) factors.push_back({x, Factor{1.0, ax}});
  return ProductVector(a.space(), std::move(factors), Factor{1.0, 0.0});
}

}  // namespace wobblelab
