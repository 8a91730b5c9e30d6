#pragma once

// Matrix-free conjugate gradient for symmetric positive (semi)definite
// systems. `apply(in, out)` must write A*in into out.

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace wobblelab {

struct SolveStats {
  std::size_t iterations = 0;
  double relative_residual = 0.0;  // ||b - A x|| / ||b||, recomputed at exit
  bool converged = false;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace detail

template <typename Apply>
SolveStats conjugate_gradient(Apply&& apply, std::span<const double> rhs, std::span<double> x,
                              double relative_tolerance, std::size_t max_iterations) {
  const std::size_t n = rhs.size();
  SolveStats stats;
  const double rhs_norm = std::sqrt(detail::dot(rhs, rhs));
  if (rhs_norm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    stats.converged = true;
    return stats;
  }

  std::vector<double> r(n), p(n), q(n);
  auto true_residual = [&] {
    apply(std::span<const double>(x), std::span<double>(q));
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - q[i];
    return std::sqrt(detail::dot(r, r));
  };

  double rr = std::pow(true_residual(), 2);
  p = r;
  const double target = relative_tolerance * rhs_norm;
  while (stats.iterations < max_iterations) {
    if (std::sqrt(rr) <= target) {
      // the recurrence drifts from b - Ax; confirm before stopping
      const double actual = true_residual();
      if (actual <= target) {
        stats.converged = true;
        stats.relative_residual = actual / rhs_norm;
        return stats;
      }
      rr = actual * actual;
      p = r;
    }
    apply(std::span<const double>(p), std::span<double>(q));
    const double alpha = rr / detail::dot(p, q);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    const double rr_next = detail::dot(r, r);
    const double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    ++stats.iterations;
  }
  const double actual = true_residual();
  stats.relative_residual = actual / rhs_norm;
  stats.converged = actual <= target;
  return stats;
}

}  // namespace wobblelab
