#include "trajlab/ot/sinkhorn.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "trajlab/core/errors.hpp"

namespace trajlab::ot {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Vec safe_log(const Vec& w) {
  Vec lw(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    lw[i] = w[i] > 0.0 ? std::log(w[i]) : kNegInf;
  }
  return lw;
}

// log sum_j exp(row_j) over one matrix row, max-subtracted.
double lse_row(const Eigen::RowVectorXd& row) {
  const double m = row.maxCoeff();
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (Eigen::Index j = 0; j < row.size(); ++j) s += std::exp(row[j] - m);
  return m + std::log(s);
}

}  // namespace

DiscreteMeasure DiscreteMeasure::uniform(std::vector<Vec> pts) {
  DiscreteMeasure m;
  const auto n = static_cast<Eigen::Index>(pts.size());
  m.points = std::move(pts);
  m.weights = Vec::Constant(n, 1.0 / static_cast<double>(n));
  return m;
}

void DiscreteMeasure::validate() const {
  if (points.empty() || weights.size() != static_cast<Eigen::Index>(points.size())) {
    throw DegenerateInputError("DiscreteMeasure: empty or mismatched support");
  }
  if (weights.minCoeff() < 0.0) {
    throw DegenerateInputError("DiscreteMeasure: negative weight");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-12) {
    throw DegenerateInputError("DiscreteMeasure: weights do not sum to 1");
  }
  const Eigen::Index d = points.front().size();
  for (const Vec& p : points) {
    if (p.size() != d) throw DimensionError("DiscreteMeasure: mixed dimensions");
    if (!p.allFinite()) throw NumericError("DiscreteMeasure: non-finite point");
  }
}

Mat cost_matrix(const std::vector<Vec>& xs, const std::vector<Vec>& ys) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  const auto m = static_cast<Eigen::Index>(ys.size());
  if (n == 0 || m == 0) throw DegenerateInputError("cost_matrix: empty input");
  const Eigen::Index d = xs.front().size();
  Mat c(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (xs[i].size() != d) throw DimensionError("cost_matrix: mixed dimensions");
    for (Eigen::Index j = 0; j < m; ++j) {
      if (ys[j].size() != d) throw DimensionError("cost_matrix: mixed dimensions");
      c(i, j) = (xs[i] - ys[j]).squaredNorm();
    }
  }
  return c;
}

TransportPlan sinkhorn(const DiscreteMeasure& a, const DiscreteMeasure& b,
                       const SinkhornOptions& opt) {
  a.validate();
  b.validate();
  if (a.dim() != b.dim()) throw DimensionError("sinkhorn: dimension mismatch");
  if (!(opt.eps > 0.0)) throw DegenerateInputError("sinkhorn: eps must be > 0");

  const Eigen::Index n = a.size();
  const Eigen::Index m = b.size();
  const Mat c = cost_matrix(a.points, b.points);
  const Vec la = safe_log(a.weights);
  const Vec lb = safe_log(b.weights);

  TransportPlan out;
  out.f = Vec::Zero(n);
  out.g = Vec::Zero(m);

  // Symmetric inputs (the debiasing self-terms) use the averaged fixed-point
  // update f <- (f + T f)/2 with g = f, which contracts where plain
  // alternation crawls.
  const bool symmetric = [&] {
    if (&a == &b) return true;
    if (n != m || a.weights != b.weights) return false;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (a.points[static_cast<std::size_t>(i)] !=
          b.points[static_cast<std::size_t>(i)]) {
        return false;
      }
    }
    return true;
  }();

  auto marginal_error = [&](double eps) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double row_sum = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        row_sum += std::exp(la[i] + lb[j] + (out.f[i] + out.g[j] - c(i, j)) / eps);
      }
      worst = std::max(worst, std::abs(row_sum - a.weights[i]));
    }
    return worst;
  };

  // Alternating log-domain updates:
  //   f_i = -eps * LSE_j(log b_j + (g_j - C_ij)/eps)
  //   g_j = -eps * LSE_i(log a_i + (f_i - C_ij)/eps)
  auto iterate = [&](double eps, double stop_tol, int budget) -> double {
    double err = std::numeric_limits<double>::infinity();
    Vec fresh(n);
    for (int it = 0; it < budget; ++it) {
      ++out.iterations;
      if (symmetric) {
        for (Eigen::Index i = 0; i < n; ++i) {
          Eigen::RowVectorXd row =
              (la.transpose().array() +
               (out.f.transpose().array() - c.row(i).array()) / eps)
                  .matrix();
          fresh[i] = -eps * lse_row(row);
        }
        out.f = 0.5 * (out.f + fresh);
        out.g = out.f;
      } else {
        for (Eigen::Index i = 0; i < n; ++i) {
          Eigen::RowVectorXd row =
              (lb.transpose().array() +
               (out.g.transpose().array() - c.row(i).array()) / eps)
                  .matrix();
          out.f[i] = -eps * lse_row(row);
        }
        for (Eigen::Index j = 0; j < m; ++j) {
          Eigen::RowVectorXd col =
              (la.transpose().array() +
               (out.f.transpose().array() - c.col(j).transpose().array()) / eps)
                  .matrix();
          out.g[j] = -eps * lse_row(col);
        }
      }
      err = marginal_error(eps);
      if (err <= stop_tol) break;
    }
    return err;
  };

  // Epsilon scaling: anneal from a coarse regularization down to the target,
  // warm-starting the duals at each level. This keeps small-eps solves from
  // stalling in the flat early regime.
  double err = std::numeric_limits<double>::infinity();
  std::vector<double> levels{opt.eps};
  while (levels.back() < 1.0) levels.push_back(levels.back() * 2.0);
  const int warm_budget = std::max(20, opt.max_iter / 8);
  for (std::size_t li = levels.size(); li-- > 0;) {
    const double eps = levels[li];
    if (li > 0) {
      if (out.iterations >= opt.max_iter) break;
      iterate(eps, std::max(opt.tol, 1e-6),
              std::min(warm_budget, opt.max_iter - out.iterations));
    } else {
      err = iterate(eps, opt.tol, std::max(0, opt.max_iter - out.iterations));
    }
  }

  out.plan = Mat(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double lp = la[i] + lb[j] + (out.f[i] + out.g[j] - c(i, j)) / opt.eps;
      out.plan(i, j) = std::exp(lp);
    }
  }
  out.marginal_err = err;
  out.converged = err <= opt.tol;
  return out;
}

namespace {

double entropic_cost(const DiscreteMeasure& a, const DiscreteMeasure& b,
                     const Mat& c, const Mat& plan, double eps) {
  // <P,C> + eps * KL(P || a (x) b), with the mass terms kept so slightly
  // unbalanced plans are still scored consistently.
  double transport = 0.0;
  double kl = 0.0;
  double mass = 0.0;
  for (Eigen::Index i = 0; i < plan.rows(); ++i) {
    for (Eigen::Index j = 0; j < plan.cols(); ++j) {
      const double p = plan(i, j);
      if (p <= 0.0) continue;
      transport += p * c(i, j);
      const double ref = a.weights[i] * b.weights[j];
      kl += p * std::log(p / ref);
      mass += p;
    }
  }
  kl += 1.0 - mass;
  return transport + eps * kl;
}

}  // namespace

OtValue ot_eps(const DiscreteMeasure& a, const DiscreteMeasure& b,
               const SinkhornOptions& opt) {
  const TransportPlan tp = sinkhorn(a, b, opt);
  const Mat c = cost_matrix(a.points, b.points);
  return {entropic_cost(a, b, c, tp.plan, opt.eps), tp.converged};
}

OtValue sinkhorn_divergence(const DiscreteMeasure& a, const DiscreteMeasure& b,
                            const SinkhornOptions& opt) {
  const OtValue ab = ot_eps(a, b, opt);
  const OtValue aa = ot_eps(a, a, opt);
  const OtValue bb = ot_eps(b, b, opt);
  return {ab.value - 0.5 * aa.value - 0.5 * bb.value,
          ab.converged && aa.converged && bb.converged};
}

PointGrads sinkhorn_grad_points(const DiscreteMeasure& a,
                                const DiscreteMeasure& b,
                                const SinkhornOptions& opt) {
  const TransportPlan ab = sinkhorn(a, b, opt);
  const TransportPlan aa = sinkhorn(a, a, opt);

  PointGrads out;
  out.converged = ab.converged && aa.converged;
  out.grads.reserve(a.points.size());
  const Eigen::Index d = a.dim();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    Vec g = Vec::Zero(d);
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      g += 2.0 * ab.plan(i, j) * (a.points[i] - b.points[j]);
    }
    // Self-term: d/dx_i OT_eps(a,a) touches x_i through both marginals; by
    // symmetry of the self-plan that is 4 * sum_j P_aa[i,j] (x_i - x_j),
    // halved by the divergence's 1/2 factor.
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      g -= 2.0 * aa.plan(i, j) * (a.points[i] - a.points[j]);
    }
    out.grads.push_back(std::move(g));
  }
  return out;
}

}  // namespace trajlab::ot
