#include "sigroute/harness.hpp"

#include <algorithm>
#include <cmath>

#include "sigroute/belief.hpp"
#include "sigroute/errors.hpp"
#include "sigroute/parallel.hpp"

namespace sigroute {

long long InvariantCounts::total() const {
  return bound_mismatches + containment_violations + barred_violations + shrink_violations + halving_violations +
         post_t0_gap_violations + balancing_violations + s_identity_mismatches + support_violations;
}

InvariantCounts& InvariantCounts::operator+=(const InvariantCounts& o) {
  bound_mismatches += o.bound_mismatches;
  bound_mismatches_with_gaps += o.bound_mismatches_with_gaps;
  containment_violations += o.containment_violations;
  barred_violations += o.barred_violations;
  shrink_violations += o.shrink_violations;
  shrink_violations_from_zero += o.shrink_violations_from_zero;
  halving_violations += o.halving_violations;
  post_t0_gap_violations += o.post_t0_gap_violations;
  balancing_violations += o.balancing_violations;
  s_identity_mismatches += o.s_identity_mismatches;
  support_violations += o.support_violations;
  return *this;
}

void ExperimentConfig::validate() const {
  params.validate();
  Policy::from_name(policy);
  if (!pi1.is_normalized(1e-9) || !pi2.is_normalized(1e-9)) throw InvalidPmf("initial beliefs must be normalized");
  if (pi1.max_support() > max_support || pi2.max_support() > max_support) {
    throw ParameterError("initial belief support exceeds the configured maximum " + std::to_string(max_support));
  }
  if (horizon < 1) throw ParameterError("horizon must be >= 1");
  if (replications < 1) throw ParameterError("replications must be >= 1");
  if (initial && (pi1[initial->x1] <= 0.0 || pi2[initial->x2] <= 0.0)) {
    throw ParameterError("explicit initial lengths must lie in the supports of the initial beliefs");
  }
  cost.validate();
}

std::vector<long long> running_checkpoints(long long horizon) {
  std::vector<long long> out;
  for (long long decade = 1; decade <= horizon; decade *= 10) {
    for (long long m : {1, 2, 5}) {
      if (m * decade < horizon) out.push_back(m * decade);
    }
  }
  out.push_back(horizon);
  return out;
}

int s_chain_next(int s, bool queue1_empty, const Primitives& w) {
  int next = s - w.d1 - w.d2 + w.a1 + w.a2;
  if (s == 1) next += (queue1_empty ? w.d1 - w.d2 : 0) + w.d2;
  if (s == 0) next += w.d1 + w.d2;
  return next;
}

namespace {

bool has_gap(const Pmf& p) {
  const auto w = p.window();
  return std::any_of(w.begin(), w.end(), [](double m) { return m == 0.0; });
}

SupportBounds bounds_of(JointBounds q1, JointBounds q2) {
  return {q1.lb, q1.ub, q2.lb, q2.ub, std::min(q1.lb, q2.lb), std::max(q1.ub, q2.ub)};
}

bool in_support(int x, const Pmf& p) { return p[x] > 0.0; }
bool in_support(int x, JointBounds q) { return x >= q.lb && x <= q.ub; }

ReplicationResult simulate(const ExperimentConfig& cfg, const Policy& policy, long long rep) {
  ReplicationResult out;
  ReplicationStats& st = out.stats;
  InvariantCounts& n = st.counts;
  st.rep = rep;

  const bool threshold_rule = policy.kind() == PolicyKind::kGhat;
  // A never-routing policy is never conditioned on, so only the support
  // interval of each belief is tracked.
  const bool full_filter = policy.kind() != PolicyKind::kG0;
  const bool barred_exact = cfg.params.interior();

  PrimitiveStreams streams(cfg.seed, static_cast<std::uint64_t>(rep), cfg.domain);
  Lengths x;
  if (cfg.initial) {
    x = *cfg.initial;
  } else {
    x.x1 = cfg.pi1.quantile(uniform01(streams.engine(Process::kInitial)));
    x.x2 = cfg.pi2.quantile(uniform01(streams.engine(Process::kInitial)));
  }
  st.initial = x;

  Pmf p1 = cfg.pi1;
  Pmf p2 = cfg.pi2;
  JointBounds q1{cfg.pi1.min_support(), cfg.pi1.max_support()};
  JointBounds q2{cfg.pi2.min_support(), cfg.pi2.max_support()};

  std::vector<long long> checkpoints;
  if (cfg.running_average) checkpoints = running_checkpoints(cfg.horizon);
  std::size_t next_checkpoint = 0;
  if (cfg.keep_traces) out.trace.reserve(static_cast<std::size_t>(cfg.horizon));

  int prev_gap = 0;
  bool prev_hold = false;
  std::optional<int> s_total;

  int t = 0;
  try {
    for (; t < cfg.horizon; ++t) {
      const SupportBounds b = full_filter ? support_bounds(p1, p2) : bounds_of(q1, q2);
      const int gap = b.ub - b.lb;
      if (full_filter ? !(in_support(x.x1, p1) && in_support(x.x2, p2))
                      : !(in_support(x.x1, q1) && in_support(x.x2, q2))) {
        ++n.support_violations;
      }
      if (!st.t0 && gap <= 1) st.t0 = t;
      if (threshold_rule) {
        if (t > 0) {
          if (gap > prev_gap) {
            ++n.shrink_violations;
            if (prev_gap == 0) ++n.shrink_violations_from_zero;
          }
          if (prev_hold && gap > (prev_gap + 1) / 2) ++n.halving_violations;
        }
        if (st.t0) {
          if (gap > 1) ++n.post_t0_gap_violations;
          if (std::abs(x.x1 - x.x2) > 1) ++n.balancing_violations;
          if (t == *st.t0 + 1) {
            s_total = x.sum();
          } else if (s_total && *s_total != x.sum()) {
            ++n.s_identity_mismatches;
            s_total = x.sum();
          }
        }
      }
      const double cost = stage_cost(x.x1, x.x2, cfg.cost, t);
      st.total_cost += cost;

      CommonInfo info;
      if (full_filter) {
        info = common_info_from_prior(p1, p2, cfg.params);
      } else {
        q1 = propagate_support(q1, cfg.params);
        q2 = propagate_support(q2, cfg.params);
        info.bounds = bounds_of(q1, q2);
        info.threshold = threshold(info.bounds);
      }
      if (barred_exact && (info.bounds.ub != b.ub + 1 || info.bounds.lb != std::max(b.lb - 1, 0))) {
        ++n.barred_violations;
      }

      const Primitives w = sample_primitives(streams, cfg.params);
      const int xbar1 = step_queue(x.x1, w.d1, w.a1);
      const int xbar2 = step_queue(x.x2, w.d2, w.a2);
      if (full_filter ? !(in_support(xbar1, info.pibar1) && in_support(xbar2, info.pibar2))
                      : !(in_support(xbar1, q1) && in_support(xbar2, q2))) {
        ++n.support_violations;
      }
      const auto [u1, u2] = policy.decide_both(xbar1, xbar2, info, t);

      if (cfg.keep_traces) {
        out.trace.push_back({rep, t, x.x1, x.x2, xbar1, xbar2, u1, u2, w.a1, w.a2, w.d1, w.d2, b.lb, b.ub,
                             info.bounds.lb, info.bounds.ub, info.threshold, cost});
      }
      if (s_total) s_total = s_chain_next(*s_total, x.x1 == 0, w);

      if (full_filter) {
        auto [post1, post2] = posterior_after_routing(info, u1, u2, policy);
        if (threshold_rule) {
          const JointBounds recursion = update_bounds_lemma1(info.bounds, u1, u2, info.threshold);
          const JointBounds filter = support_bounds(post1, post2).joint();
          if (!(recursion == filter)) {
            ++n.bound_mismatches;
            if (has_gap(info.pibar1) || has_gap(info.pibar2)) ++n.bound_mismatches_with_gaps;
            if (!st.first_mismatch_t) st.first_mismatch_t = t;
          }
          if (filter.lb < recursion.lb || filter.ub > recursion.ub) ++n.containment_violations;
        }
        p1 = std::move(post1);
        p2 = std::move(post2);
      }

      x = apply_routing(xbar1, xbar2, u1, u2);
      prev_gap = gap;
      prev_hold = u1 == 0 && u2 == 0;

      if (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == t + 1) {
        st.running.emplace_back(t + 1, st.total_cost / static_cast<double>(t + 1));
        ++next_checkpoint;
      }
    }
  } catch (const SimulationError&) {
    throw;
  } catch (const Error& e) {
    throw SimulationError(rep, t, e.what());
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

ReplicationResult run_replication(const ExperimentConfig& config, long long rep) {
  config.validate();
  return simulate(config, Policy::from_name(config.policy), rep);
}

RunSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Policy policy = Policy::from_name(config.policy);

  struct Slot {
    std::optional<ReplicationResult> result;
    std::string error;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(config.replications));
  parallel_blocks(config.replications, config.threads, [&](int, long long begin, long long end) {
    for (long long r = begin; r < end; ++r) {
      Slot& slot = slots[static_cast<std::size_t>(r)];
      try {
        slot.result = simulate(config, policy, r);
        if (!config.keep_traces) slot.result->trace.clear();
      } catch (const Error& e) {
        slot.error = e.what();
      }
    }
  });

  RunSummary sum;
  std::vector<double> values;
  std::vector<long long> checkpoints;
  std::vector<double> running_total;
  for (Slot& slot : slots) {
    if (!slot.result) {
      sum.failures.push_back(slot.error);
      continue;
    }
    ReplicationStats& st = slot.result->stats;
    ++sum.replications;
    values.push_back(config.running_average ? st.total_cost / config.horizon : st.total_cost);
    sum.counts += st.counts;
    if (st.t0) {
      ++sum.t0_histogram[*st.t0];
    } else {
      ++sum.t0_censored;
    }
    if (config.running_average) {
      if (running_total.empty()) running_total.assign(st.running.size(), 0.0);
      for (std::size_t k = 0; k < st.running.size(); ++k) running_total[k] += st.running[k].second;
      if (checkpoints.empty()) {
        for (const auto& [tc, w] : st.running) checkpoints.push_back(tc);
      }
    }
    if (config.keep_traces) {
      sum.traces.insert(sum.traces.end(), slot.result->trace.begin(), slot.result->trace.end());
    }
    sum.per_replication.push_back(std::move(st));
  }

  sum.mean = mean_of(values);
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - sum.mean) * (v - sum.mean);
    sum.std_error = std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
  }
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    sum.running.emplace_back(checkpoints[k], running_total[k] / static_cast<double>(sum.replications));
  }
  if (!sum.running.empty()) {
    const double terminal = sum.running.back().second;
    for (const auto& [tc, w] : sum.running) {
      if (2 * tc >= config.horizon) sum.tail_spread = std::max(sum.tail_spread, std::abs(w - terminal));
    }
  }
  return sum;
}

double T0Report::censored_fraction() const {
  return replications == 0 ? 0.0 : static_cast<double>(censored) / static_cast<double>(replications);
}

T0Report measure_t0(const ExperimentConfig& config) {
  if (config.policy != "ghat") throw ParameterError("T0 is defined for the threshold policy only");
  const RunSummary s = run_experiment(config);
  if (!s.failures.empty()) throw SimulationError(-1, -1, s.failures.front());
  T0Report r;
  r.histogram = s.t0_histogram;
  r.censored = s.t0_censored;
  r.replications = s.replications;
  r.post_t0_gap_violations = s.counts.post_t0_gap_violations;
  return r;
}

SIdentityResult assert_s_identity(const std::vector<TraceRecord>& trace) {
  SIdentityResult res;
  for (const TraceRecord& r : trace) {
    if (r.ub - r.lb <= 1) {
      res.t0 = r.t;
      break;
    }
  }
  if (!res.t0) return res;
  std::optional<int> s;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const TraceRecord& r = trace[k];
    if (r.t <= *res.t0) continue;
    if (!s) {
      s = r.x1 + r.x2;
      continue;
    }
    const TraceRecord& prev = trace[k - 1];
    s = s_chain_next(*s, prev.x1 == 0, Primitives{prev.a1, prev.a2, prev.d1, prev.d2});
    ++res.checked;
    if (*s != r.x1 + r.x2) {
      res.passed = false;
      res.first_mismatch_t = r.t;
      return res;
    }
  }
  return res;
}

}  // namespace sigroute
