#pragma once

#include <functional>
#include <string>
#include <utility>

#include "sigroute/belief.hpp"
#include "sigroute/model.hpp"

namespace sigroute {

enum class PolicyKind { kGhat, kG0, kGtilde, kCustom };

// Tolerance used when an integer length is compared with a belief mean.
inline constexpr double kMeanTieTolerance = 1e-9;

// Threshold rule on the common-information bounds: route iff
// xbar >= (ub + lb)/2 and xbar > 0.
int ghat_decide(int xbar, const CommonInfo& info);

// Open loop: never route.
int g0_decide(int xbar, const CommonInfo& info);

// Route iff xbar >= E[other queue's pre-decision length] (and xbar > 0).
// `own` is 0 for queue 1 and 1 for queue 2.
int gtilde_decide(int xbar, const CommonInfo& info, int own);

// A decentralized decision rule of the form u = g(own pre-decision length,
// common info, t). decide() forces 0 for an empty queue whatever the rule
// says, so the action constraint holds for every policy.
class Policy {
 public:
  using Rule = std::function<int(int queue, int xbar, const CommonInfo& info, int t)>;

  static Policy ghat();
  static Policy g0();
  static Policy gtilde();
  // A rule outside the catalog. It can be simulated only where its
  // conditioning events are not needed.
  static Policy custom(std::string name, Rule rule);
  // "ghat" | "g0" | "gtilde"; throws ParameterError otherwise.
  static Policy from_name(const std::string& name);

  int decide(int queue, int xbar, const CommonInfo& info, int t = 0) const;
  std::pair<int, int> decide_both(int xbar1, int xbar2, const CommonInfo& info, int t = 0) const {
    return {decide(0, xbar1, info, t), decide(1, xbar2, info, t)};
  }

  PolicyKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  bool in_catalog() const { return kind_ != PolicyKind::kCustom; }

 private:
  Policy(PolicyKind kind, std::string name, Rule rule = {})
      : kind_(kind), name_(std::move(name)), rule_(std::move(rule)) {}

  PolicyKind kind_;
  std::string name_;
  Rule rule_;
};

// Pre-decision common information for the first slot, or for any slot whose
// post-routing beliefs are (pi1, pi2).
CommonInfo common_info_from_prior(const Pmf& pi1, const Pmf& pi2, const ModelParams& params);

// Post-routing beliefs Pi_{t+1} after both controllers' actions were seen:
// condition each pre-decision belief on the acting policy's event for its
// own action, then apply the routing shift.
std::pair<Pmf, Pmf> posterior_after_routing(const CommonInfo& info, int u1, int u2,
                                            const Policy& policy);

// Next slot's pre-decision common information: posterior_after_routing
// followed by one slot of arrivals and departures. Throws
// UnsupportedConditioning for policies outside the catalog.
CommonInfo advance_common_info(const CommonInfo& info, int u1, int u2, const ModelParams& params,
                               const Policy& policy);

}  // namespace sigroute
