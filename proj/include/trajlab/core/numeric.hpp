#pragma once

#include <span>
#include <vector>

#include "trajlab/core/types.hpp"

namespace trajlab {

/// Pairwise (cascade) summation; reduction error stays O(log n) ulps so
/// chunked parallel reductions agree with the serial result to ~1e-12.
double pairwise_sum(std::span<const double> xs);

inline double pairwise_mean(std::span<const double> xs) {
  return xs.empty() ? 0.0 : pairwise_sum(xs) / static_cast<double>(xs.size());
}

/// log(sum_i exp(x_i)) with max-subtraction; -inf entries contribute zero.
double log_sum_exp(const Vec& x);

/// x / ||x||. Throws DegenerateInputError when ||x|| is ~0.
Vec l2_normalize(const Vec& x);

/// Gradient pullback of y = x/||x||: dx = (dy - y*(y.dot(dy))) / ||x||.
Vec l2_normalize_backward(const Vec& x, const Vec& dy);

bool all_finite(const Vec& v);
bool all_finite(const Mat& m);

}  // namespace trajlab
