#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sigroute/half_integer.hpp"
#include "sigroute/model.hpp"
#include "sigroute/pmf.hpp"
#include "sigroute/policies.hpp"

namespace sigroute {

// Finite-horizon problem: minimize E[sum_{t=0}^{horizon-1} c_t(X1_t) + c_t(X2_t)].
// With horizon = 1 only the initial state is charged; horizon = 2 leaves one
// routing decision that matters.
struct ExactEvalConfig {
  int horizon = 1;
  ModelParams params;
  Pmf pi1;
  Pmf pi2;
  CostModel cost;
  // 0 selects the smallest cap that truncates nothing.
  int state_cap = 0;
  // Limit on enumerated paths (raw mode) or nodes per layer (layered mode).
  std::uint64_t budget = 50'000'000;

  void validate() const;
  // Bound on any single queue length reachable within the horizon: the total
  // number of customers grows by at most 2 per slot and routing can put all
  // of them in one queue.
  int required_state_cap() const;
};

enum class EnumerationMode {
  kLayered,   // merge paths that agree on (X1, X2, common information)
  kRawPaths,  // every initial pair times every primitive sequence; slow reference
};

struct ExactResult {
  double cost = 0.0;
  // Total probability of the enumerated paths; 1 up to rounding.
  double total_weight = 0.0;
  std::uint64_t work = 0;
  HalfInteger threshold0;
  // Law of X1_t + X2_t, dense from 0, for t = 0..horizon-1 (layered mode).
  std::vector<std::vector<double>> sum_law;
};

ExactResult exact_finite_cost(const Policy& policy, const ExactEvalConfig& config,
                              EnumerationMode mode = EnumerationMode::kLayered);

// Optimal centralized actions: for t = 0..horizon-2 and pre-decision state
// (xbar1, xbar2). Ties resolve to (0,0), then (1,0), (0,1), (1,1).
class ActionTable {
 public:
  ActionTable() = default;
  ActionTable(int horizon, int cap);

  std::pair<int, int> action(int t, int xbar1, int xbar2) const;
  bool defined(int t, int xbar1, int xbar2) const;
  void set(int t, int xbar1, int xbar2, int code);
  int decisions() const { return decisions_; }
  int cap() const { return cap_; }

 private:
  std::size_t index(int t, int xbar1, int xbar2) const;
  int decisions_ = 0;
  int cap_ = 0;
  std::vector<std::uint8_t> codes_;
};

struct DpResult {
  double cost = 0.0;
  ActionTable actions;
  int state_cap = 0;
};

// Backward induction over the joint state for a controller that sees both
// queues. Its optimum lower-bounds every decentralized policy.
DpResult centralized_dp(const ExactEvalConfig& config);

struct DominanceCheck {
  std::string policy;
  bool holds = true;
  // max over (t, a) of P_ghat(S_t >= a) - P_policy(S_t >= a)
  double max_excess = 0.0;
  int worst_t = 0;
  int worst_a = 0;
};

struct DominanceReport {
  std::vector<DominanceCheck> checks;
  bool holds() const;
};

// First-order stochastic dominance of X1_t + X2_t under the threshold rule
// against each comparison policy, at every t < horizon, from exact laws.
DominanceReport verify_dominance_smallcase(std::span<const Policy> comparisons,
                                           const ExactEvalConfig& config, double tol = 1e-12);

}  // namespace sigroute
