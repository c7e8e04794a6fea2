#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sigroute/half_integer.hpp"
#include "sigroute/model.hpp"
#include "sigroute/pmf.hpp"
#include "sigroute/policies.hpp"

namespace sigroute {

struct ExperimentConfig {
  ModelParams params;
  std::string policy = "ghat";
  Pmf pi1;
  Pmf pi2;
  // Explicit initial lengths; otherwise each queue is drawn from its belief.
  std::optional<Lengths> initial;
  int horizon = 1000;
  long long replications = 1;
  std::uint64_t seed = 1;
  // Separates unrelated experiments that share a seed.
  std::uint64_t domain = 0;
  CostModel cost = CostModel(CostFunction::linear());
  // Largest admissible initial support point.
  int max_support = 1000;
  int threads = 0;
  bool keep_traces = false;
  // Report running averages W_t = (1/t) sum_{s<t} cost at log-spaced t.
  bool running_average = false;

  void validate() const;
};

// One slot of one replication. (x1, x2) are the lengths at t and (lb, ub)
// the joint support bounds of the beliefs about them; the barred fields and
// the threshold refer to the pre-decision beliefs of the same slot, and
// (u1, u2) move the system to t + 1. stage_cost is c_t(x1) + c_t(x2).
struct TraceRecord {
  long long rep = 0;
  int t = 0;
  int x1 = 0;
  int x2 = 0;
  int xbar1 = 0;
  int xbar2 = 0;
  int u1 = 0;
  int u2 = 0;
  int a1 = 0;
  int a2 = 0;
  int d1 = 0;
  int d2 = 0;
  int lb = 0;
  int ub = 0;
  int lbbar = 0;
  int ubbar = 0;
  HalfInteger threshold;
  double stage_cost = 0.0;
};

// Counters of the relations checked online along a path. All of them are 0
// on a clean run.
struct InvariantCounts {
  // Closed-form bound update differs from the bounds of the exact filter.
  long long bound_mismatches = 0;
  // The subset of those where a pre-decision belief had a gap in its support.
  long long bound_mismatches_with_gaps = 0;
  // Filter bounds fall outside the closed-form bounds.
  long long containment_violations = 0;
  // Pre-decision bounds differ from (ub + 1, (lb - 1)^+); interior rates only.
  long long barred_violations = 0;
  // ub - lb increased.
  long long shrink_violations = 0;
  // The subset of those that started from ub == lb.
  long long shrink_violations_from_zero = 0;
  // After a (0,0) step, ub - lb exceeded ceil of half the previous gap.
  long long halving_violations = 0;
  // ub - lb > 1 at some t >= T0.
  long long post_t0_gap_violations = 0;
  // |x1 - x2| > 1 at some t >= T0.
  long long balancing_violations = 0;
  // x1 + x2 differs from the reconstructed total after T0.
  long long s_identity_mismatches = 0;
  // A true length outside the support of its belief.
  long long support_violations = 0;

  // Everything except the subset counters.
  long long total() const;
  InvariantCounts& operator+=(const InvariantCounts& o);
};

struct ReplicationStats {
  long long rep = 0;
  Lengths initial;
  double total_cost = 0.0;
  // First t with ub_t - lb_t <= 1; empty if censored at the horizon.
  std::optional<int> t0;
  std::optional<int> first_mismatch_t;
  InvariantCounts counts;
  // (t, W_t) at the running-average checkpoints.
  std::vector<std::pair<long long, double>> running;
};

struct ReplicationResult {
  ReplicationStats stats;
  std::vector<TraceRecord> trace;
};

// Simulates one seeded path. Errors from the belief filter or the policy are
// rethrown as SimulationError carrying the replication and step.
ReplicationResult run_replication(const ExperimentConfig& config, long long rep);

struct RunSummary {
  long long replications = 0;
  // Mean total cost (or terminal running average) and its standard error.
  double mean = 0.0;
  double std_error = 0.0;
  // Mean running average across replications at the checkpoints.
  std::vector<std::pair<long long, double>> running;
  // max |W_t - W_T| over checkpoints in the second half of the horizon.
  double tail_spread = 0.0;
  std::map<int, long long> t0_histogram;
  long long t0_censored = 0;
  InvariantCounts counts;
  std::vector<std::string> failures;
  std::vector<ReplicationStats> per_replication;
  // Traces of all replications in index order when keep_traces is set.
  std::vector<TraceRecord> traces;

  bool passed() const { return counts.total() == 0 && failures.empty(); }
};

// Runs every replication on a worker pool and merges in index order, so the
// summary does not depend on the thread count.
RunSummary run_experiment(const ExperimentConfig& config);

struct T0Report {
  std::map<int, long long> histogram;
  long long censored = 0;
  long long replications = 0;
  long long post_t0_gap_violations = 0;
  double censored_fraction() const;
};

// Requires the threshold policy.
T0Report measure_t0(const ExperimentConfig& config);

// Total after one slot as the balanced-chain recursion sees it, from the
// current total, whether queue 1 is empty and the slot's primitives.
int s_chain_next(int s, bool queue1_empty, const Primitives& w);

struct SIdentityResult {
  bool passed = true;
  std::optional<int> t0;
  std::optional<int> first_mismatch_t;
  long long checked = 0;
};

// Rebuilds the total from T0 + 1 on with s_chain_next and compares it with
// x1 + x2 at every later record of a single-replication trace.
SIdentityResult assert_s_identity(const std::vector<TraceRecord>& trace);

// Log-spaced running-average checkpoints 1, 2, 5, 10, 20, 50, ... and horizon.
std::vector<long long> running_checkpoints(long long horizon);

}  // namespace sigroute
