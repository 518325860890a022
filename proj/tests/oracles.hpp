#pragma once

// Test-only oracles, independent of the implementation paths they check.

#include <algorithm>
#include <numeric>
#include <vector>

#include "trajlab/core/types.hpp"
#include "trajlab/ot/sinkhorn.hpp"

namespace trajlab::testing {

/// Exact optimal transport cost between two uniform n-point clouds under
/// squared Euclidean cost, by enumerating all n! assignments (n <= 8).
inline double exact_assignment_cost(const std::vector<Vec>& xs,
                                    const std::vector<Vec>& ys) {
  const std::size_t n = xs.size();
  const Mat c = ot::cost_matrix(xs, ys);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      total += c(static_cast<Eigen::Index>(i), perm[i]);
    }
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(n);
}

/// k-step transition probabilities of a 2-state chain by repeated squaring of
/// nothing fancier than the definition: row-stochastic powers.
struct TwoStateChain {
  double enter;  // P(e_{t+1}=1 | e_t=0)
  double stay;   // P(e_{t+1}=1 | e_t=1)

  /// P(e_{t+k}=1 | e_t = from) for from in {0,1}.
  double k_step_error_prob(int from, int k) const {
    double p1 = from == 1 ? 1.0 : 0.0;
    for (int i = 0; i < k; ++i) {
      p1 = p1 * stay + (1.0 - p1) * enter;
    }
    return p1;
  }
};

}  // namespace trajlab::testing
