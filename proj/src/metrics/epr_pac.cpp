#include "trajlab/metrics/epr_pac.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "trajlab/core/errors.hpp"
#include "trajlab/core/parallel.hpp"

namespace trajlab::metrics {

std::optional<int> first_error_time(const std::vector<std::uint8_t>& flags) {
  for (std::size_t t = 0; t < flags.size(); ++t) {
    if (flags[t] != 0) return static_cast<int>(t);
  }
  return std::nullopt;
}

MatchKey make_match_key(const EpisodeErrors& ep, int t) {
  MatchKey key;
  key.task_id = ep.task_id;
  key.subgoal_id =
      ep.subgoal_ids.empty() ? 0 : ep.subgoal_ids[static_cast<std::size_t>(t)];
  const int T = static_cast<int>(ep.flags.size());
  key.step_bin = T > 0 ? (t * 10) / T : 0;
  key.horizon_bin = T / 10;
  return key;
}

namespace {

struct KeyHash {
  std::size_t operator()(const MatchKey& k) const {
    std::size_t h = std::hash<int>{}(k.task_id);
    h = h * 1000003u + static_cast<std::size_t>(k.subgoal_id + 7);
    h = h * 1000003u + static_cast<std::size_t>(k.step_bin + 7);
    return h;
  }
};
struct KeyEq {
  bool operator()(const MatchKey& a, const MatchKey& b) const {
    return a.matches(b);
  }
};

double quantile_sorted(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  if (xs.empty()) return 0.0;
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return xs[lo] * (1.0 - frac) + xs[hi] * frac;
}

struct OlsFit {
  double slope = 0.0;
  bool defined = false;
};

OlsFit ols_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto n = xs.size();
  if (n < 2) return {};
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0) return {};
  return {sxy / sxx, true};
}

// Case/pool construction over a multiset of episode slots. Slot indices (not
// the original episode ids) carry identity so bootstrap copies are distinct.
struct CaseControlData {
  std::vector<CasePoint> cases;
  std::vector<ControlPoint> pool;
};

CaseControlData build_points(const std::vector<EpisodeErrors>& episodes,
                             const std::vector<int>& slots, int k_max) {
  CaseControlData out;
  for (std::size_t slot = 0; slot < slots.size(); ++slot) {
    const EpisodeErrors& ep = episodes[static_cast<std::size_t>(slots[slot])];
    const int T = static_cast<int>(ep.flags.size());
    const auto t0 = first_error_time(ep.flags);
    if (t0.has_value()) {
      out.cases.push_back(
          {static_cast<int>(slot), *t0, make_match_key(ep, *t0)});
    }
    // Control candidates: clean history up to t and the full lag horizon
    // observable. Steps at or after the first error are ineligible.
    const int clean_end = t0.has_value() ? *t0 : T;
    for (int t = 0; t < clean_end; ++t) {
      if (t + k_max >= T) break;
      out.pool.push_back({static_cast<int>(slot), t, make_match_key(ep, t)});
    }
  }
  return out;
}

struct CurvePoint {
  bool defined = false;
  double epr = 0.0;
  double p_case = 0.0;
  double p_ctrl = 0.0;
  long n = 0;
};

// Matched-pair estimates at each lag; pairs are dropped at lags their case
// cannot observe (structural censoring guard).
std::vector<CurvePoint> estimate_lags(const std::vector<EpisodeErrors>& episodes,
                                      const std::vector<int>& slots,
                                      const MatchResult& match, int k_max,
                                      bool ipcw) {
  std::vector<CurvePoint> points(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) {
    // Survival of the case horizon at this lag, for optional reweighting.
    long at_risk = 0;
    for (const MatchedPair& pr : match.pairs) {
      const auto& ep = episodes[static_cast<std::size_t>(
          slots[static_cast<std::size_t>(pr.case_pt.episode)])];
      if (pr.case_pt.t0 + k < static_cast<int>(ep.flags.size())) ++at_risk;
    }
    const double survival =
        match.pairs.empty()
            ? 0.0
            : static_cast<double>(at_risk) / static_cast<double>(match.pairs.size());
    const double w = (ipcw && survival > 0.0) ? 1.0 / survival : 1.0;

    double case_hits = 0.0;
    double ctrl_hits = 0.0;
    double denom = 0.0;
    for (const MatchedPair& pr : match.pairs) {
      const auto& case_ep = episodes[static_cast<std::size_t>(
          slots[static_cast<std::size_t>(pr.case_pt.episode)])];
      if (pr.case_pt.t0 + k >= static_cast<int>(case_ep.flags.size())) continue;
      const auto& ctrl_ep = episodes[static_cast<std::size_t>(
          slots[static_cast<std::size_t>(pr.ctrl_pt.episode)])];
      denom += w;
      case_hits +=
          w * case_ep.flags[static_cast<std::size_t>(pr.case_pt.t0 + k)];
      ctrl_hits +=
          w * ctrl_ep.flags[static_cast<std::size_t>(pr.ctrl_pt.t + k)];
    }
    CurvePoint& pt = points[static_cast<std::size_t>(k - 1)];
    if (denom > 0.0) {
      pt.defined = true;
      pt.p_case = case_hits / denom;
      pt.p_ctrl = ctrl_hits / denom;
      pt.epr = pt.p_case - pt.p_ctrl;
      pt.n = at_risk;
    }
  }
  return points;
}

std::vector<int> identity_slots(std::size_t n) {
  std::vector<int> slots(n);
  for (std::size_t i = 0; i < n; ++i) slots[i] = static_cast<int>(i);
  return slots;
}

void percentile_ci(std::vector<double>& vals, double level, LagStat& stat) {
  if (vals.size() < 8) return;
  const double alpha = (1.0 - level) / 2.0;
  std::sort(vals.begin(), vals.end());
  const auto at = [&](double q) {
    const double pos = q * static_cast<double>(vals.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return vals[lo] * (1.0 - frac) + vals[hi] * frac;
  };
  stat.has_ci = true;
  stat.ci_lo = at(alpha);
  stat.ci_hi = at(1.0 - alpha);
}

}  // namespace

MatchResult match_controls(const std::vector<CasePoint>& cases,
                           const std::vector<ControlPoint>& pool, Rng& rng) {
  std::unordered_map<MatchKey, std::vector<ControlPoint>, KeyHash, KeyEq> groups;
  for (const ControlPoint& cp : pool) groups[cp.key].push_back(cp);
  // One shuffle per key group makes the without-replacement draw seeded and
  // order-independent of pool construction details.
  for (auto& [key, group] : groups) {
    for (std::size_t i = group.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(i));
      std::swap(group[i - 1], group[j]);
    }
  }
  std::unordered_map<MatchKey, std::size_t, KeyHash, KeyEq> cursor;

  MatchResult out;
  for (const CasePoint& c : cases) {
    auto it = groups.find(c.key);
    bool matched = false;
    if (it != groups.end()) {
      auto& group = it->second;
      std::size_t& pos = cursor[c.key];
      // Skip same-episode candidates without consuming them.
      for (std::size_t probe = pos; probe < group.size(); ++probe) {
        if (group[probe].episode == c.episode) continue;
        std::swap(group[pos], group[probe]);
        out.pairs.push_back({c, group[pos]});
        ++pos;
        matched = true;
        break;
      }
    }
    if (!matched) out.unmatched.push_back(c);
  }
  return out;
}

EprCurve epr_curve(const std::vector<EpisodeErrors>& episodes,
                   const EprOptions& opt) {
  if (opt.max_lag < 1) throw DegenerateInputError("epr_curve: max_lag must be >= 1");
  EprCurve curve;
  curve.k_requested = opt.max_lag;

  const std::vector<int> slots = identity_slots(episodes.size());
  Rng root(opt.seed);

  // Censoring guard: cap the lag range at the 25th percentile of remaining
  // horizon over cases.
  std::vector<double> horizons;
  for (const EpisodeErrors& ep : episodes) {
    const auto t0 = first_error_time(ep.flags);
    if (t0.has_value()) {
      horizons.push_back(static_cast<double>(
          static_cast<int>(ep.flags.size()) - *t0 - 1));
    }
  }
  curve.n_cases = static_cast<long>(horizons.size());
  const int cap = horizons.empty()
                      ? 0
                      : static_cast<int>(std::floor(quantile_sorted(horizons, 0.25)));
  curve.k_used = std::max(0, std::min(opt.max_lag, cap));

  curve.lags.resize(static_cast<std::size_t>(opt.max_lag));
  for (int k = 1; k <= opt.max_lag; ++k) {
    curve.lags[static_cast<std::size_t>(k - 1)].k = k;
  }
  if (curve.k_used == 0) return curve;

  Rng match_rng = root.split(0);
  const CaseControlData data = build_points(episodes, slots, curve.k_used);
  const MatchResult match = match_controls(data.cases, data.pool, match_rng);
  curve.n_matched = static_cast<long>(match.pairs.size());
  curve.n_unmatched = static_cast<long>(match.unmatched.size());

  const auto points =
      estimate_lags(episodes, slots, match, curve.k_used, opt.ipcw);
  for (int k = 1; k <= curve.k_used; ++k) {
    const CurvePoint& pt = points[static_cast<std::size_t>(k - 1)];
    LagStat& stat = curve.lags[static_cast<std::size_t>(k - 1)];
    stat.defined = pt.defined;
    stat.value = pt.epr;
    stat.p_case = pt.p_case;
    stat.p_ctrl = pt.p_ctrl;
    stat.n_case = pt.n;
    stat.n_ctrl = pt.n;
  }

  if (opt.n_boot > 0 && !episodes.empty()) {
    // Replicate-indexed slots keep parallel runs bit-identical.
    std::vector<std::vector<CurvePoint>> reps(
        static_cast<std::size_t>(opt.n_boot));
    parallel_for_indexed(opt.n_boot, opt.threads, [&](int rep) {
      Rng rep_rng = root.split(static_cast<std::uint64_t>(rep) + 1);
      std::vector<int> rs(episodes.size());
      for (auto& slot : rs) {
        slot = static_cast<int>(rep_rng.uniform_int(episodes.size()));
      }
      const CaseControlData d = build_points(episodes, rs, curve.k_used);
      Rng m_rng = rep_rng.split(0xB007);
      const MatchResult m = match_controls(d.cases, d.pool, m_rng);
      reps[static_cast<std::size_t>(rep)] =
          estimate_lags(episodes, rs, m, curve.k_used, opt.ipcw);
    });
    for (int k = 1; k <= curve.k_used; ++k) {
      std::vector<double> samples;
      samples.reserve(static_cast<std::size_t>(opt.n_boot));
      for (const auto& pts : reps) {
        const CurvePoint& pt = pts[static_cast<std::size_t>(k - 1)];
        if (pt.defined) samples.push_back(pt.epr);
      }
      percentile_ci(samples, opt.ci_level,
                    curve.lags[static_cast<std::size_t>(k - 1)]);
    }
  }
  return curve;
}

double auc_epr(const EprCurve& curve, int W) {
  if (W < 1 || W > static_cast<int>(curve.lags.size())) {
    throw DegenerateInputError("auc_epr: W outside the estimated range");
  }
  double sum = 0.0;
  for (int k = 1; k <= W; ++k) {
    const LagStat& stat = curve.lags[static_cast<std::size_t>(k - 1)];
    if (!stat.defined) {
      throw DegenerateInputError("auc_epr: undefined lag " + std::to_string(k) +
                                 " in range");
    }
    sum += stat.value;
  }
  return sum;
}

double epr_slope(const EprCurve& curve) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const LagStat& stat : curve.lags) {
    if (stat.defined) {
      xs.push_back(static_cast<double>(stat.k));
      ys.push_back(stat.value);
    }
  }
  const OlsFit fit = ols_slope(xs, ys);
  if (!fit.defined) {
    throw DegenerateInputError("epr_slope: needs at least two defined lags");
  }
  return fit.slope;
}

namespace {

// Pooled post-error risks q(k) for k = 1..k_max over the episode multiset.
struct PostErrorRisk {
  std::vector<double> q;
  std::vector<long> n;
  long cases = 0;
};

PostErrorRisk post_error_risk(const std::vector<EpisodeErrors>& episodes,
                              const std::vector<int>& slots, int k_max) {
  PostErrorRisk out;
  out.q.assign(static_cast<std::size_t>(k_max), 0.0);
  out.n.assign(static_cast<std::size_t>(k_max), 0);
  std::vector<double> hits(static_cast<std::size_t>(k_max), 0.0);
  for (int slot_idx : slots) {
    const EpisodeErrors& ep = episodes[static_cast<std::size_t>(slot_idx)];
    const auto t0 = first_error_time(ep.flags);
    if (!t0.has_value()) continue;
    ++out.cases;
    const int T = static_cast<int>(ep.flags.size());
    for (int k = 1; k <= k_max && *t0 + k < T; ++k) {
      out.n[static_cast<std::size_t>(k - 1)] += 1;
      hits[static_cast<std::size_t>(k - 1)] +=
          ep.flags[static_cast<std::size_t>(*t0 + k)];
    }
  }
  for (int k = 0; k < k_max; ++k) {
    if (out.n[static_cast<std::size_t>(k)] > 0) {
      out.q[static_cast<std::size_t>(k)] =
          hits[static_cast<std::size_t>(k)] /
          static_cast<double>(out.n[static_cast<std::size_t>(k)]);
    }
  }
  return out;
}

}  // namespace

SlopeValue pac_slope(const std::vector<EpisodeErrors>& episodes, int d_lo,
                     int d_hi, double eps_reg) {
  if (d_lo < 1 || d_hi < d_lo) {
    throw DegenerateInputError("pac_slope: bad fit range");
  }
  const auto risk =
      post_error_risk(episodes, identity_slots(episodes.size()), d_hi);
  std::vector<double> xs;
  std::vector<double> ys;
  bool any_positive = false;
  for (int k = d_lo; k <= d_hi; ++k) {
    if (risk.n[static_cast<std::size_t>(k - 1)] == 0) continue;
    const double q = risk.q[static_cast<std::size_t>(k - 1)];
    any_positive = any_positive || q > 0.0;
    xs.push_back(static_cast<double>(k));
    ys.push_back(std::log(q + eps_reg));
  }
  if (!any_positive) return {};  // flagged undefined: no post-error risk at all
  const OlsFit fit = ols_slope(xs, ys);
  if (!fit.defined) return {};
  return {-fit.slope, true};
}

PacResult pac_ratio(const std::vector<EpisodeErrors>& episodes,
                    const PacOptions& opt) {
  if (opt.max_lag < 1) throw DegenerateInputError("pac_ratio: max_lag must be >= 1");
  PacResult res;

  std::vector<double> horizons;
  for (const EpisodeErrors& ep : episodes) {
    const auto t0 = first_error_time(ep.flags);
    if (t0.has_value()) {
      horizons.push_back(static_cast<double>(
          static_cast<int>(ep.flags.size()) - *t0 - 1));
    }
  }
  const int cap = horizons.empty()
                      ? 0
                      : static_cast<int>(std::floor(quantile_sorted(horizons, 0.25)));
  res.k_used = std::max(0, std::min(opt.max_lag, cap));
  res.ratio.resize(static_cast<std::size_t>(opt.max_lag));
  for (int k = 1; k <= opt.max_lag; ++k) {
    res.ratio[static_cast<std::size_t>(k - 1)].k = k;
  }
  if (res.k_used == 0) return res;

  const std::vector<int> slots = identity_slots(episodes.size());
  const auto risk = post_error_risk(episodes, slots, res.k_used);
  res.q.assign(risk.q.begin(), risk.q.end());
  res.n_at_lag.assign(risk.n.begin(), risk.n.end());
  res.n_cases = risk.cases;

  const double q1 = risk.q.empty() ? 0.0 : risk.q[0];
  res.unstable = q1 < opt.eps_reg;
  const double denom = q1 + opt.eps_reg;
  for (int k = 1; k <= res.k_used; ++k) {
    LagStat& stat = res.ratio[static_cast<std::size_t>(k - 1)];
    if (risk.n[static_cast<std::size_t>(k - 1)] == 0) continue;
    stat.defined = true;
    stat.value = (risk.q[static_cast<std::size_t>(k - 1)] + opt.eps_reg) / denom;
    stat.n_case = risk.n[static_cast<std::size_t>(k - 1)];
  }

  const int fit_hi = opt.fit_hi > 0 ? std::min(opt.fit_hi, res.k_used) : res.k_used;
  if (fit_hi >= opt.fit_lo + 1) {
    const SlopeValue s = pac_slope(episodes, opt.fit_lo, fit_hi, opt.eps_reg);
    res.slope = s.value;
    res.slope_defined = s.defined;
  }

  auto auc = [&](int W, double& out_value) {
    if (W > res.k_used) return false;
    double sum = 0.0;
    for (int k = 1; k <= W; ++k) {
      const LagStat& stat = res.ratio[static_cast<std::size_t>(k - 1)];
      if (!stat.defined) return false;
      sum += stat.value;
    }
    out_value = sum / static_cast<double>(W);
    return true;
  };
  res.auc3_defined = auc(3, res.auc3);
  res.auc5_defined = auc(5, res.auc5);

  if (opt.n_boot > 0 && !episodes.empty()) {
    Rng root(opt.seed);
    std::vector<PostErrorRisk> reps(static_cast<std::size_t>(opt.n_boot));
    parallel_for_indexed(opt.n_boot, opt.threads, [&](int rep) {
      Rng rep_rng = root.split(static_cast<std::uint64_t>(rep) + 1);
      std::vector<int> rs(episodes.size());
      for (auto& slot : rs) {
        slot = static_cast<int>(rep_rng.uniform_int(episodes.size()));
      }
      reps[static_cast<std::size_t>(rep)] =
          post_error_risk(episodes, rs, res.k_used);
    });
    for (int k = 1; k <= res.k_used; ++k) {
      std::vector<double> samples;
      for (const PostErrorRisk& r : reps) {
        if (r.n[static_cast<std::size_t>(k - 1)] == 0) continue;
        const double d = (r.q.empty() ? 0.0 : r.q[0]) + opt.eps_reg;
        samples.push_back((r.q[static_cast<std::size_t>(k - 1)] + opt.eps_reg) / d);
      }
      percentile_ci(samples, opt.ci_level,
                    res.ratio[static_cast<std::size_t>(k - 1)]);
    }
  }
  return res;
}

}  // namespace trajlab::metrics
