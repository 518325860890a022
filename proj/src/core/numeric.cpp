#include "trajlab/core/numeric.hpp"

#include <cmath>
#include <limits>

#include "trajlab/core/errors.hpp"

namespace trajlab {

namespace {

double pairwise_sum_range(const double* xs, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += xs[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_range(xs, half) + pairwise_sum_range(xs + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> xs) {
  return pairwise_sum_range(xs.data(), xs.size());
}

double log_sum_exp(const Vec& x) {
  if (x.size() == 0) return -std::numeric_limits<double>::infinity();
  const double m = x.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf, or a stray +inf/NaN propagates
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::exp(x[i] - m);
  return m + std::log(s);
}

Vec l2_normalize(const Vec& x) {
  const double n = x.norm();
  if (!(n > 1e-300)) {
    throw DegenerateInputError("l2_normalize: zero-norm vector");
  }
  return x / n;
}

Vec l2_normalize_backward(const Vec& x, const Vec& dy) {
  const double n = x.norm();
  if (!(n > 1e-300)) {
    throw DegenerateInputError("l2_normalize_backward: zero-norm vector");
  }
  const Vec y = x / n;
  return (dy - y * y.dot(dy)) / n;
}

bool all_finite(const Vec& v) { return v.allFinite(); }
bool all_finite(const Mat& m) { return m.allFinite(); }

}  // namespace trajlab
