#include "trajlab/core/mlp.hpp"

#include <cmath>

#include "trajlab/core/errors.hpp"

namespace trajlab {

void MlpParams::set_zero() {
  w1.setZero();
  b1.setZero();
  w2.setZero();
  b2.setZero();
}

MlpParams MlpParams::zeros(Eigen::Index in, Eigen::Index hidden,
                           Eigen::Index out) {
  MlpParams p;
  p.w1 = Mat::Zero(hidden, in);
  p.b1 = Vec::Zero(hidden);
  p.w2 = Mat::Zero(out, hidden);
  p.b2 = Vec::Zero(out);
  return p;
}

MlpParams MlpParams::glorot(Eigen::Index in, Eigen::Index hidden,
                            Eigen::Index out, Rng& rng) {
  MlpParams p = zeros(in, hidden, out);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(in));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (Eigen::Index i = 0; i < p.w1.size(); ++i) p.w1.data()[i] = s1 * rng.gaussian();
  for (Eigen::Index i = 0; i < p.w2.size(); ++i) p.w2.data()[i] = s2 * rng.gaussian();
  return p;
}

Vec mlp_forward(const MlpParams& p, const Vec& x) {
  if (x.size() != p.in_dim()) {
    throw DimensionError("mlp_forward: input size does not match W1 columns");
  }
  const Vec h = (p.w1 * x + p.b1).array().tanh().matrix();
  return p.w2 * h + p.b2;
}

MlpBackward mlp_backward(const MlpParams& p, const Vec& x, const Vec& dy) {
  if (x.size() != p.in_dim()) {
    throw DimensionError("mlp_backward: input size does not match W1 columns");
  }
  if (dy.size() != p.out_dim()) {
    throw DimensionError("mlp_backward: dy size does not match W2 rows");
  }
  const Vec a = p.w1 * x + p.b1;
  const Vec h = a.array().tanh().matrix();

  MlpBackward out;
  out.dparams = MlpParams::zeros(p.in_dim(), p.hidden_dim(), p.out_dim());
  out.dparams.w2 = dy * h.transpose();
  out.dparams.b2 = dy;
  const Vec dh = p.w2.transpose() * dy;
  const Vec da = dh.cwiseProduct((1.0 - h.array().square()).matrix());
  out.dparams.w1 = da * x.transpose();
  out.dparams.b1 = da;
  out.dx = p.w1.transpose() * da;
  return out;
}

Vec mlp_flatten(const MlpParams& p) {
  Vec flat(p.param_count());
  Eigen::Index off = 0;
  auto put = [&](const double* d, Eigen::Index n) {
    flat.segment(off, n) = Eigen::Map<const Vec>(d, n);
    off += n;
  };
  put(p.w1.data(), p.w1.size());
  put(p.b1.data(), p.b1.size());
  put(p.w2.data(), p.w2.size());
  put(p.b2.data(), p.b2.size());
  return flat;
}

void mlp_unflatten(MlpParams& p, const Vec& flat) {
  if (flat.size() != p.param_count()) {
    throw DimensionError("mlp_unflatten: size mismatch");
  }
  Eigen::Index off = 0;
  auto take = [&](double* d, Eigen::Index n) {
    Eigen::Map<Vec>(d, n) = flat.segment(off, n);
    off += n;
  };
  take(p.w1.data(), p.w1.size());
  take(p.b1.data(), p.b1.size());
  take(p.w2.data(), p.w2.size());
  take(p.b2.data(), p.b2.size());
}

}  // namespace trajlab
