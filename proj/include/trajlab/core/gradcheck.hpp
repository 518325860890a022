#pragma once

#include <functional>

#include "trajlab/core/types.hpp"

namespace trajlab {

/// Central-difference gradient: g_i = (f(x + h e_i) - f(x - h e_i)) / (2h).
Vec finite_diff_grad(const std::function<double(const Vec&)>& f, const Vec& x,
                     double h = 1e-5);

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor); the agreement measure used
/// by every analytic-vs-finite-difference check.
double max_rel_error(const Vec& a, const Vec& b, double floor = 1e-6);

}  // namespace trajlab
