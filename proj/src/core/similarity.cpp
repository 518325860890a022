#include "trajlab/core/similarity.hpp"

#include "trajlab/core/errors.hpp"

namespace trajlab {

namespace {

void check_norms(double na, double nb) {
  if (!(na > 1e-300) || !(nb > 1e-300)) {
    throw DegenerateInputError("cosine_sim: zero-norm input");
  }
}

}  // namespace

double cosine_sim(const Vec& a, const Vec& b, double tau) {
  if (a.size() != b.size()) {
    throw DimensionError("cosine_sim: dimension mismatch");
  }
  const double na = a.norm();
  const double nb = b.norm();
  check_norms(na, nb);
  return a.dot(b) / (na * nb * tau);
}

CosineSimGrad cosine_sim_grad(const Vec& a, const Vec& b, double tau) {
  if (a.size() != b.size()) {
    throw DimensionError("cosine_sim_grad: dimension mismatch");
  }
  const double na = a.norm();
  const double nb = b.norm();
  check_norms(na, nb);
  const double cosab = a.dot(b) / (na * nb);
  CosineSimGrad g;
  g.value = cosab / tau;
  g.da = (b / (na * nb) - cosab * a / (na * na)) / tau;
  g.db = (a / (na * nb) - cosab * b / (nb * nb)) / tau;
  return g;
}

}  // namespace trajlab
