#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trajlab/core/rng.hpp"

namespace trajlab::metrics {

/// Step-level binary error indicators for one episode, with the context
/// needed to build matching keys.
struct EpisodeErrors {
  std::string episode_id;
  int task_id = 0;
  std::vector<std::uint8_t> flags;
  std::vector<int> subgoal_ids;  // same length as flags; empty means all-zero
};

/// Earliest t with e_t = 1; episodes with no error are excluded from case
/// construction.
std::optional<int> first_error_time(const std::vector<std::uint8_t>& flags);

/// Matching context at one (episode, step): task/scene, subgoal, step-index
/// decile and a horizon bucket. Matching compares task, subgoal and step
/// decile exactly; the horizon bucket is carried for reporting.
struct MatchKey {
  int task_id = 0;
  int subgoal_id = 0;
  int step_bin = 0;
  int horizon_bin = 0;

  bool operator==(const MatchKey&) const = default;
  bool matches(const MatchKey& o) const {
    return task_id == o.task_id && subgoal_id == o.subgoal_id &&
           step_bin == o.step_bin;
  }
};

MatchKey make_match_key(const EpisodeErrors& ep, int t);

struct CasePoint {
  int episode = 0;  // index into the episode list
  int t0 = 0;
  MatchKey key;
};

struct ControlPoint {
  int episode = 0;
  int t = 0;
  MatchKey key;
};

struct MatchedPair {
  CasePoint case_pt;
  ControlPoint ctrl_pt;
};

struct MatchResult {
  std::vector<MatchedPair> pairs;
  std::vector<CasePoint> unmatched;  // reported, never silently dropped
};

/// Pair each case with one context-matched control, sampled without
/// replacement; a control never comes from the case's own episode. Pool
/// entries must already satisfy the eligibility rules (clean history and
/// t + k_max within horizon).
MatchResult match_controls(const std::vector<CasePoint>& cases,
                           const std::vector<ControlPoint>& pool, Rng& rng);

struct LagStat {
  int k = 0;
  bool defined = false;
  double value = 0.0;
  double p_case = 0.0;
  double p_ctrl = 0.0;
  long n_case = 0;
  long n_ctrl = 0;
  bool has_ci = false;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct EprOptions {
  int max_lag = 10;
  int n_boot = 0;        // 0 disables confidence intervals
  double ci_level = 0.95;
  bool ipcw = false;     // inverse-probability-of-censoring weighting
  std::uint64_t seed = 0;
  int threads = 1;  // bootstrap replicates use split streams, so results are
                    // identical for any thread count
};

struct EprCurve {
  std::vector<LagStat> lags;  // index 0 holds lag 1
  int k_requested = 0;
  int k_used = 0;  // after the 25th-percentile censoring guard
  long n_cases = 0;
  long n_matched = 0;
  long n_unmatched = 0;
};

/// Matched case-control excess-risk curve with per-episode bootstrap CIs.
/// A lag with zero matched pairs is flagged undefined, never reported as 0.
EprCurve epr_curve(const std::vector<EpisodeErrors>& episodes,
                   const EprOptions& opt);

/// Sum of the first W lags. Throws DegenerateInputError when any lag in the
/// range is undefined.
double auc_epr(const EprCurve& curve, int W);

/// Ordinary least-squares slope of the defined (k, EPR_k) points.
double epr_slope(const EprCurve& curve);

struct PacOptions {
  int max_lag = 10;
  double eps_reg = 1e-4;
  int n_boot = 0;
  double ci_level = 0.95;
  std::uint64_t seed = 0;
  int fit_lo = 1;   // lag range for the log-slope fit
  int fit_hi = -1;  // -1: up to k_used
  int threads = 1;
};

struct PacResult {
  std::vector<LagStat> ratio;  // PAC_k = (q(k)+eps) / (q(1)+eps); PAC_1 = 1
  std::vector<double> q;       // raw post-error risks q(k)
  std::vector<long> n_at_lag;
  double slope = 0.0;  // decay-rate form: -slope of ln(q+eps) on the lag
  bool slope_defined = false;
  double auc3 = 0.0;
  bool auc3_defined = false;
  double auc5 = 0.0;
  bool auc5_defined = false;
  bool unstable = false;  // q(1) below the regularization floor
  int k_used = 0;
  long n_cases = 0;
};

/// Post-error risk diagnostics in both reported forms: the normalized ratio
/// curve with AUCs, and the log-linear decay rate.
PacResult pac_ratio(const std::vector<EpisodeErrors>& episodes,
                    const PacOptions& opt);

struct SlopeValue {
  double value = 0.0;
  bool defined = false;
};

/// Decay-rate form alone: -OLS slope of ln(q(delta)+eps_reg) over
/// delta in [d_lo, d_hi]. Undefined when fewer than two lags are estimable
/// or every q is zero.
SlopeValue pac_slope(const std::vector<EpisodeErrors>& episodes, int d_lo,
                     int d_hi, double eps_reg);

}  // namespace trajlab::metrics
