#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "sigroute/errors.hpp"
#include "sigroute/half_integer.hpp"
#include "sigroute/model.hpp"
#include "sigroute/pmf.hpp"

namespace sigroute {

struct JointBounds {
  int lb = 0;
  int ub = 0;
  int gap() const { return ub - lb; }
  friend bool operator==(const JointBounds&, const JointBounds&) = default;
};

// Per-queue support bounds of a pair of beliefs and their joint extremes.
struct SupportBounds {
  int lb1 = 0;
  int ub1 = 0;
  int lb2 = 0;
  int ub2 = 0;
  int lb = 0;
  int ub = 0;

  JointBounds joint() const { return {lb, ub}; }
  int lower(int queue) const { return queue == 0 ? lb1 : lb2; }
  int upper(int queue) const { return queue == 0 ? ub1 : ub2; }
  friend bool operator==(const SupportBounds&, const SupportBounds&) = default;
};

// What both controllers know before deciding in a slot: the pre-decision
// beliefs on each queue, their support bounds and the routing threshold.
struct CommonInfo {
  Pmf pibar1;
  Pmf pibar2;
  SupportBounds bounds;
  HalfInteger threshold;

  // Builds the record and derives bounds/threshold from the beliefs.
  static CommonInfo from_beliefs(Pmf pibar1, Pmf pibar2);

  const Pmf& belief(int queue) const { return queue == 0 ? pibar1 : pibar2; }
};

// Law of (X - D)^+ + A for X ~ pi and one slot's primitives.
Pmf propagate_arrivals_departures(const Pmf& pi, const ModelParams& params);

// Bayes step for an observed routing indicator: keep the states x where
// `routes(x)` equals u, renormalize by the exact retained mass. Throws
// ZeroProbabilityEvent when nothing is retained.
template <class RoutesFn>
Pmf condition_on_routing(Pmf pibar, int u, RoutesFn&& routes) {
  const auto window = pibar.window();
  const int lo = pibar.min_support();
  std::vector<double> kept(window.begin(), window.end());
  double mass = 0.0;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const int x = lo + static_cast<int>(k);
    if ((routes(x) ? 1 : 0) != u) {
      kept[k] = 0.0;
    } else {
      mass += kept[k];
    }
  }
  if (!(mass > 0.0)) {
    throw ZeroProbabilityEvent("routing indicator " + std::to_string(u) +
                               " has zero probability under the current belief");
  }
  for (double& p : kept) p /= mass;
  return Pmf::from_window(lo, std::move(kept));
}

// The threshold event of the common-information threshold rule:
// u = 1 on {x >= threshold, x > 0}, u = 0 on its complement.
Pmf condition_on_action(Pmf pibar, int u, HalfInteger threshold);

// Law of X - u_own + u_other.
Pmf shift_by_routing(Pmf pi, int u_own, int u_other);

SupportBounds support_bounds(const Pmf& pi1, const Pmf& pi2);

// (ub + lb) / 2, exact.
HalfInteger threshold(const SupportBounds& bounds);

// Closed-form next-slot bounds of the post-routing beliefs under the
// threshold policy, given the pre-decision bounds, the actions and the
// threshold. A zero threshold is treated as 1/2 because an empty queue
// cannot route.
JointBounds update_bounds_lemma1(const SupportBounds& barred, int u1, int u2, HalfInteger th);

// Pre-decision bounds implied by post-routing bounds: (ub + 1, (lb - 1)^+).
JointBounds barred_from_prior(JointBounds prior);

// Exact support interval of the image of a support interval under one slot
// of primitives. Used where only the bounds (not the masses) of a belief
// that is never conditioned are needed.
JointBounds propagate_support(JointBounds support, const ModelParams& params);

}  // namespace sigroute
