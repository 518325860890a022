#pragma once

#include <vector>

#include "trajlab/core/types.hpp"

namespace trajlab::ot {

/// Weighted point cloud in the shared embedding space.
struct DiscreteMeasure {
  std::vector<Vec> points;
  Vec weights;

  /// Uniform weights 1/n over the given support.
  static DiscreteMeasure uniform(std::vector<Vec> pts);
  /// Throws unless weights are nonnegative, sum to 1 within 1e-12, and every
  /// point shares one dimension.
  void validate() const;

  Eigen::Index size() const { return weights.size(); }
  Eigen::Index dim() const { return points.empty() ? 0 : points.front().size(); }
};

/// C[i][j] = ||x_i - y_j||^2.
Mat cost_matrix(const std::vector<Vec>& xs, const std::vector<Vec>& ys);

struct SinkhornOptions {
  double eps = 0.05;
  int max_iter = 500;
  double tol = 1e-9;  // l_inf marginal violation
};

struct TransportPlan {
  Mat plan;      // n x m coupling
  Vec f;         // dual potential on the source
  Vec g;         // dual potential on the target
  int iterations = 0;
  double marginal_err = 0.0;
  bool converged = false;
};

/// Log-domain Sinkhorn iterations for the entropy-regularized coupling.
/// Non-convergence within max_iter is reported through `converged`, never
/// thrown; callers decide whether a flagged plan is still usable.
TransportPlan sinkhorn(const DiscreteMeasure& a, const DiscreteMeasure& b,
                       const SinkhornOptions& opt);

struct OtValue {
  double value = 0.0;
  bool converged = false;
};

/// Entropic cost <P, C> + eps * KL(P || a (x) b).
OtValue ot_eps(const DiscreteMeasure& a, const DiscreteMeasure& b,
               const SinkhornOptions& opt);

/// Debiased divergence OT_eps(a,b) - (OT_eps(a,a) + OT_eps(b,b)) / 2.
OtValue sinkhorn_divergence(const DiscreteMeasure& a, const DiscreteMeasure& b,
                            const SinkhornOptions& opt);

struct PointGrads {
  std::vector<Vec> grads;  // d S_eps / d x_i for each support point of a
  bool converged = false;
};

/// Gradient of sinkhorn_divergence(a, b) in the support points of `a`,
/// using the converged plans (envelope form, debiasing self-term included):
///   g_i = 2 * [ sum_j P_ab[i,j] (x_i - y_j) - sum_j P_aa[i,j] (x_i - x_j) ].
PointGrads sinkhorn_grad_points(const DiscreteMeasure& a,
                                const DiscreteMeasure& b,
                                const SinkhornOptions& opt);

}  // namespace trajlab::ot
