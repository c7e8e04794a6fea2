// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "sigroute/coupling.hpp"
#include "sigroute/exact.hpp"
#include "sigroute/harness.hpp"
#include "sigroute/parallel.hpp"
#include "sigroute/steady.hpp"

using namespace sigroute;

namespace {

using Clock = std::chrono::steady_clock;

const Pmf kTwoPoint = Pmf::from_dense({0, 0.9, 0, 0, 0, 0.1});

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ExperimentConfig two_point_paths(double lambda, int horizon, long long reps, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.params = ModelParams{lambda, 0.5};
  cfg.pi1 = Pmf::point(3);
  cfg.pi2 = kTwoPoint;
  cfg.horizon = horizon;
  cfg.replications = reps;
  cfg.seed = seed;
  return cfg;
}

void counterexample() {
  const auto start = Clock::now();
  struct Row {
    Convention c;
    double ghat, gtilde;
    HalfInteger th;
  };
  std::vector<Row> rows;
  for (Convention c : {Convention::kIndependent, Convention::kExclusive}) {
    ExactEvalConfig cfg;
    cfg.horizon = 2;
    cfg.params = ModelParams{0.1, 0.5, c};
    cfg.pi1 = Pmf::point(3);
    cfg.pi2 = kTwoPoint;
    cfg.cost = CostModel::parse("zero;square");
    const ExactResult g = exact_finite_cost(Policy::ghat(), cfg);
    const ExactResult m = exact_finite_cost(Policy::gtilde(), cfg);
    rows.push_back({c, g.cost, m.cost, g.threshold0});
  }
  const double elapsed = seconds_since(start);
  bool reproduced = false;
  std::string detail;
  for (const Row& r : rows) {
    const bool match = std::abs(r.ghat - 8.48) <= 0.005 && std::abs(r.gtilde - 8.28) <= 0.005;
    reproduced = reproduced || match;
    detail += fmt("%s ghat=%.6f gtilde=%.6f TH0=%s%s; ", to_string(r.c).c_str(), r.ghat, r.gtilde,
                  r.th.to_string().c_str(), match ? " (matches 8.48/8.28)" : "");
  }
  bool ordered = true;
  bool th_ok = true;
  for (const Row& r : rows) {
    ordered = ordered && r.gtilde < r.ghat;
    th_ok = th_ok && r.th == HalfInteger::from_int(3);
  }
  report(1, reproduced && ordered && th_ok && elapsed < 1.0, detail + fmt("%.3f s", elapsed));
}

void oracle_grid() {
  const auto start = Clock::now();
  double worst = 0.0;
  int cases = 0;
  for (int x0 : {0, 1, 3}) {
    for (int horizon : {2, 3, 4}) {
      for (double lambda : {0.1, 0.3}) {
        for (const char* cost : {"linear", "square"}) {
          ExactEvalConfig cfg;
          cfg.horizon = horizon;
          cfg.params = ModelParams{lambda, 0.5};
          cfg.pi1 = Pmf::point(x0);
          cfg.pi2 = Pmf::point(x0);
          cfg.cost = CostModel::parse(cost);
          const double diff = std::abs(exact_finite_cost(Policy::ghat(), cfg).cost - centralized_dp(cfg).cost);
          worst = std::max(worst, diff);
          ++cases;
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  report(2, worst <= 1e-9 && elapsed < 30.0,
         fmt("%d cases, max |J_ghat - J_centralized| = %.3g, %.2f s", cases, worst, elapsed));
}

void balancing() {
  ExperimentConfig cfg;
  cfg.params = ModelParams{0.3, 0.5};
  cfg.pi1 = Pmf::point(3);
  cfg.pi2 = Pmf::point(3);
  cfg.initial = Lengths{3, 3};
  cfg.horizon = 500;
  cfg.replications = 10'000;
  cfg.seed = 301;
  const RunSummary s = run_experiment(cfg);
  report(3, s.failures.empty() && s.replications == 10'000 && s.counts.balancing_violations == 0,
         fmt("%lld paths x %d steps, |x1-x2|>1 at %lld steps", s.replications, cfg.horizon,
             s.counts.balancing_violations));
}

void bound_relations() {
  const auto start = Clock::now();
  const RunSummary s = run_experiment(two_point_paths(0.1, 10'000, 10'000, 401));
  const InvariantCounts& n = s.counts;
  const double elapsed = seconds_since(start);
  long long mismatch_paths = 0;
  std::map<int, long long> first_t;
  for (const ReplicationStats& st : s.per_replication) {
    if (st.first_mismatch_t) {
      ++mismatch_paths;
      ++first_t[*st.first_mismatch_t];
    }
  }
  std::string where;
  for (const auto& [t, k] : first_t) where += fmt("%s t=%d:%lld", where.empty() ? "" : ",", t, k);
  report(4, s.failures.empty() && n.bound_mismatches == 0,
         fmt("bound recursion vs filter: %lld mismatches on %lld of %lld paths (%lld with a support hole; first at%s), "
             "containment violations %lld",
             n.bound_mismatches, mismatch_paths, s.replications, n.bound_mismatches_with_gaps,
             where.empty() ? " -" : where.c_str(), n.containment_violations));
  report(5, s.failures.empty() && n.shrink_violations == 0 && n.halving_violations == 0,
         fmt("gap increases %lld (%lld from gap 0), halving violations %lld, gap>1 after T0 %lld",
             n.shrink_violations, n.shrink_violations_from_zero, n.halving_violations, n.post_t0_gap_violations));
  const long long max_t0 = s.t0_histogram.empty() ? -1 : s.t0_histogram.rbegin()->first;
  report(6, s.failures.empty() && s.t0_censored == 0 && n.post_t0_gap_violations == 0,
         fmt("censored %lld of %lld, max T0 %lld, post-T0 gap>1 at %lld steps (%.1f s for criteria 4-6)",
             s.t0_censored, s.replications, max_t0, n.post_t0_gap_violations, elapsed));
}

void infinite_horizon() {
  const ModelParams p{0.1, 0.5};
  const CostModel lin(CostFunction::linear());
  const double j_ghat = infinite_cost_ghat(p, lin).value;
  const double j_g0 = infinite_cost_g0(p, lin).value;

  auto simulate = [&](const Pmf& pi1, const Pmf& pi2) {
    ExperimentConfig cfg;
    cfg.params = p;
    cfg.pi1 = pi1;
    cfg.pi2 = pi2;
    cfg.horizon = 1'000'000;
    cfg.replications = 8;
    cfg.seed = 701;
    cfg.cost = lin;
    cfg.running_average = true;
    return run_experiment(cfg);
  };
  const RunSummary empty = simulate(Pmf::point(0), Pmf::point(0));
  const RunSummary two = simulate(Pmf::point(3), kTwoPoint);
  const bool ok = empty.failures.empty() && two.failures.empty() &&
                  std::abs(empty.mean - j_ghat) <= 0.01 * j_ghat && std::abs(two.mean - j_ghat) <= 0.01 * j_ghat &&
                  std::abs(empty.mean - two.mean) <= 0.01 * std::max(empty.mean, two.mean) && j_ghat <= j_g0 &&
                  std::abs(j_g0 - 0.45) <= 0.01 * 0.45;
  report(7, ok,
         fmt("J_ghat stationary %.6f, simulated %.6f (empty start) and %.6f (two-point start), J_g0 %.6f",
             j_ghat, empty.mean, two.mean, j_g0));
}

void coupling() {
  CouplingConfig cfg;
  cfg.params = ModelParams{0.3, 0.5};
  cfg.pi1 = Pmf::point(3);
  cfg.pi2 = kTwoPoint;
  cfg.cost = CostModel(CostFunction::square());
  cfg.horizon = 200;
  cfg.replications = 100'000;
  cfg.seed = 801;
  const CouplingReport r = run_coupling(cfg);
  std::string tv;
  for (const TvCheck& c : r.tv) tv += fmt(" t=%d q%d %.4f<=%.4f", c.t, c.queue + 1, c.distance, c.band);
  report(8, r.paths == 100'000 && r.violations() == 0 && r.swaps > 0 && r.tv_ok() && r.tv.size() == 6,
         fmt("sum/max/cost violations %lld/%lld/%lld, swap branch taken %lld times, TV%s", r.sum_violations,
             r.max_violations, r.cost_violations, r.swaps, tv.c_str()));
}

void total_identity() {
  ExperimentConfig cfg = two_point_paths(0.3, 500, 10'000, 901);
  cfg.keep_traces = true;
  std::atomic<long long> failed{0}, no_t0{0}, checked{0};
  parallel_blocks(cfg.replications, 0, [&](int, long long begin, long long end) {
    for (long long rep = begin; rep < end; ++rep) {
      const SIdentityResult r = assert_s_identity(run_replication(cfg, rep).trace);
      if (!r.passed) ++failed;
      if (!r.t0) ++no_t0;
      checked += r.checked;
    }
  });
  report(9, failed == 0 && no_t0 == 0,
         fmt("%lld traces, %lld total-recursion steps checked, %lld mismatching traces, %lld without T0",
             cfg.replications, checked.load(), failed.load(), no_t0.load()));
}

}  // namespace

int main() {
  counterexample();
  oracle_grid();
  balancing();
  bound_relations();
  infinite_horizon();
  coupling();
  total_identity();
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
