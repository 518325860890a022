#pragma once

#include "trajlab/core/rng.hpp"
#include "trajlab/core/types.hpp"

namespace trajlab {

/// Two-layer perceptron y = W2 * tanh(W1 * x + b1) + b2.
/// The one network shape shared by encoder heads, cross-level predictors and
/// score networks; small enough that all gradients are hand-derived.
struct MlpParams {
  Mat w1;  // hidden x in
  Vec b1;  // hidden
  Mat w2;  // out x hidden
  Vec b2;  // out

  Eigen::Index in_dim() const { return w1.cols(); }
  Eigen::Index hidden_dim() const { return w1.rows(); }
  Eigen::Index out_dim() const { return w2.rows(); }
  Eigen::Index param_count() const {
    return w1.size() + b1.size() + w2.size() + b2.size();
  }

  void set_zero();

  static MlpParams zeros(Eigen::Index in, Eigen::Index hidden, Eigen::Index out);
  /// Scaled-Gaussian init (std 1/sqrt(fan_in)), biases zero.
  static MlpParams glorot(Eigen::Index in, Eigen::Index hidden, Eigen::Index out,
                          Rng& rng);
};

Vec mlp_forward(const MlpParams& p, const Vec& x);

struct MlpBackward {
  MlpParams dparams;
  Vec dx;
};

/// Exact gradient of <dy, mlp_forward(p, x)> with respect to p and x.
MlpBackward mlp_backward(const MlpParams& p, const Vec& x, const Vec& dy);

/// Flat views used by optimizers and finite-difference tests.
Vec mlp_flatten(const MlpParams& p);
void mlp_unflatten(MlpParams& p, const Vec& flat);

}  // namespace trajlab
