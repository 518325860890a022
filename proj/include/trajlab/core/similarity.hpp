#pragma once

#include "trajlab/core/types.hpp"

namespace trajlab {

/// Temperature-scaled cosine similarity <a,b> / (||a|| ||b|| tau).
/// Throws DegenerateInputError if either vector has ~zero norm.
double cosine_sim(const Vec& a, const Vec& b, double tau);

struct CosineSimGrad {
  double value;
  Vec da;
  Vec db;
};

CosineSimGrad cosine_sim_grad(const Vec& a, const Vec& b, double tau);

}  // namespace trajlab
