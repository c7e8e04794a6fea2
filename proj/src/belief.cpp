#include "sigroute/belief.hpp"

namespace sigroute {

CommonInfo CommonInfo::from_beliefs(Pmf pibar1, Pmf pibar2) {
  CommonInfo info;
  info.bounds = support_bounds(pibar1, pibar2);
  info.threshold = sigroute::threshold(info.bounds);
  info.pibar1 = std::move(pibar1);
  info.pibar2 = std::move(pibar2);
  return info;
}

Pmf propagate_arrivals_departures(const Pmf& pi, const ModelParams& params) {
  const SlotLaw law(params);
  const int lo = pi.min_support();
  const int out_lo = lo > 0 ? lo - 1 : 0;
  const auto window = pi.window();
  std::vector<double> out(window.size() + 2, 0.0);
  for (std::size_t k = 0; k < window.size(); ++k) {
    const int x = lo + static_cast<int>(k);
    const double w = window[k];
    for (const SlotOutcome& o : law) {
      out[static_cast<std::size_t>(step_queue(x, o.departure, o.arrival) - out_lo)] += w * o.prob;
    }
  }
  return Pmf::from_window(out_lo, std::move(out));
}

Pmf condition_on_action(Pmf pibar, int u, HalfInteger th) {
  return condition_on_routing(std::move(pibar), u, [th](int x) { return x > 0 && x >= th; });
}

Pmf shift_by_routing(Pmf pi, int u_own, int u_other) {
  const int delta = u_other - u_own;
  if (delta != 0) pi.translate(delta);
  return pi;
}

SupportBounds support_bounds(const Pmf& pi1, const Pmf& pi2) {
  SupportBounds b;
  b.lb1 = pi1.min_support();
  b.ub1 = pi1.max_support();
  b.lb2 = pi2.min_support();
  b.ub2 = pi2.max_support();
  b.lb = std::min(b.lb1, b.lb2);
  b.ub = std::max(b.ub1, b.ub2);
  return b;
}

HalfInteger threshold(const SupportBounds& bounds) { return HalfInteger::midpoint(bounds.ub, bounds.lb); }

JointBounds update_bounds_lemma1(const SupportBounds& barred, int u1, int u2, HalfInteger th) {
  const int ceil_th = static_cast<int>(std::max<std::int64_t>(th.ceil(), 1));
  if (u1 == 0 && u2 == 0) return {barred.lb, ceil_th - 1};
  if (u1 == 1 && u2 == 1) return {ceil_th, barred.ub};
  const int routing = u1 == 1 ? 0 : 1;
  const int holding = 1 - routing;
  return {std::min(barred.lower(holding) + 1, ceil_th - 1),
          std::max(barred.upper(routing) - 1, ceil_th)};
}

JointBounds barred_from_prior(JointBounds prior) {
  return {prior.lb > 0 ? prior.lb - 1 : 0, prior.ub + 1};
}

JointBounds propagate_support(JointBounds support, const ModelParams& params) {
  const SlotLaw law(params);
  JointBounds out{support.ub + 2, support.lb - 2};
  for (const SlotOutcome& o : law) {
    out.lb = std::min(out.lb, step_queue(support.lb, o.departure, o.arrival));
    out.ub = std::max(out.ub, step_queue(support.ub, o.departure, o.arrival));
  }
  return out;
}

}  // namespace sigroute
