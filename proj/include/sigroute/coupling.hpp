#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sigroute/belief.hpp"
#include "sigroute/model.hpp"
#include "sigroute/pmf.hpp"

namespace sigroute {

// Threshold-controlled lengths (x1, x2) and the coupled uncontrolled pair
// (y1, y2) built on the same primitives.
struct CoupledState {
  int x1 = 0;
  int x2 = 0;
  int y1 = 0;
  int y2 = 0;

  bool sum_dominated() const { return x1 + x2 <= y1 + y2; }
  bool max_dominated() const { return std::max(x1, x2) <= std::max(y1, y2); }
  friend bool operator==(const CoupledState&, const CoupledState&) = default;
};

struct CoupleStepResult {
  CoupledState next;
  int xbar1 = 0;
  int xbar2 = 0;
  int u1 = 0;
  int u2 = 0;
  // Departures were re-associated between the longer and shorter y-queue.
  bool swapped = false;
  // Primitives actually applied to (y1, y2).
  Primitives y_primitives;
};

// Longer queue index (0 or 1); ties go to queue 1 (index 0).
inline int longer_index(int a, int b) { return b > a ? 1 : 0; }

// Advances x one slot under the threshold rule with `info` (the pre-decision
// common information for this slot) and y by y' = (y - D~)^+ + A~. Arrivals
// follow the longer/shorter roles of x; departures do too except in the
// swap case: y_longer - 1 == x1 == x2 and the x-primitives in
// (A_long, D_long, A_short, D_short) order are (0,1,1,0) or (0,0,1,1).
// Throws InvariantViolation if sum or max dominance fails afterwards.
CoupleStepResult couple_step(const CoupledState& state, const Primitives& w, const CommonInfo& info);

struct CouplingConfig {
  ModelParams params;
  Pmf pi1;
  Pmf pi2;
  CostModel cost = CostModel(CostFunction::square());
  int horizon = 200;
  long long replications = 100'000;
  std::uint64_t seed = 1;
  std::vector<int> checkpoints{1, 5, 20};
  // Also simulate independent never-routing queues and compare marginals.
  bool distribution_check = true;
  int threads = 0;

  void validate() const;
};

struct TvCheck {
  int t = 0;
  int queue = 0;
  double distance = 0.0;
  // Sum over categories of 3 binomial standard errors of a difference of two
  // proportions, halved like the distance.
  double band = 0.0;
  bool within() const { return distance <= band; }
};

struct CouplingViolation {
  long long replication = 0;
  int t = 0;
  std::uint64_t seed = 0;
  std::string what;
};

struct CouplingReport {
  long long paths = 0;
  long long steps = 0;
  long long swaps = 0;
  long long sum_violations = 0;
  long long max_violations = 0;
  long long cost_violations = 0;
  std::optional<CouplingViolation> first_violation;
  std::vector<TvCheck> tv;

  long long violations() const { return sum_violations + max_violations + cost_violations; }
  bool tv_ok() const;
};

// Coupled simulation of `replications` paths. x starts from independent
// draws from (pi1, pi2), y starts equal to x. The independent reference
// queues use their own streams (domain 1) and their own initial draws.
CouplingReport run_coupling(const CouplingConfig& config);

// run_coupling restricted to the marginal-law comparison.
CouplingReport verify_distribution_match(const ModelParams& params, const Pmf& pi1, const Pmf& pi2, int horizon,
                                         long long replications, std::uint64_t seed = 1, int threads = 0);

// run_coupling restricted to pathwise cost dominance.
CouplingReport verify_cost_dominance(const ModelParams& params, const CostModel& cost, const Pmf& pi1,
                                     const Pmf& pi2, int horizon, long long replications, std::uint64_t seed = 1,
                                     int threads = 0);

}  // namespace sigroute
