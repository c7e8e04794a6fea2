#include "sigroute/policies.hpp"

#include "sigroute/errors.hpp"

namespace sigroute {

int ghat_decide(int xbar, const CommonInfo& info) {
  return (xbar > 0 && xbar >= info.threshold) ? 1 : 0;
}

int g0_decide(int, const CommonInfo&) { return 0; }

int gtilde_decide(int xbar, const CommonInfo& info, int own) {
  const double other_mean = info.belief(1 - own).mean();
  return (xbar > 0 && static_cast<double>(xbar) + kMeanTieTolerance >= other_mean) ? 1 : 0;
}

Policy Policy::ghat() { return Policy(PolicyKind::kGhat, "ghat"); }
Policy Policy::g0() { return Policy(PolicyKind::kG0, "g0"); }
Policy Policy::gtilde() { return Policy(PolicyKind::kGtilde, "gtilde"); }

Policy Policy::custom(std::string name, Rule rule) {
  if (!rule) throw ParameterError("custom policy needs a rule");
  return Policy(PolicyKind::kCustom, std::move(name), std::move(rule));
}

Policy Policy::from_name(const std::string& name) {
  if (name == "ghat") return ghat();
  if (name == "g0") return g0();
  if (name == "gtilde") return gtilde();
  throw ParameterError("unknown policy '" + name + "' (expected ghat|g0|gtilde)");
}

int Policy::decide(int queue, int xbar, const CommonInfo& info, int t) const {
  if (xbar <= 0) return 0;
  switch (kind_) {
    case PolicyKind::kGhat:
      return ghat_decide(xbar, info);
    case PolicyKind::kG0:
      return 0;
    case PolicyKind::kGtilde:
      return gtilde_decide(xbar, info, queue);
    case PolicyKind::kCustom:
      return rule_(queue, xbar, info, t) != 0 ? 1 : 0;
  }
  return 0;
}

CommonInfo common_info_from_prior(const Pmf& pi1, const Pmf& pi2, const ModelParams& params) {
  return CommonInfo::from_beliefs(propagate_arrivals_departures(pi1, params),
                                  propagate_arrivals_departures(pi2, params));
}

std::pair<Pmf, Pmf> posterior_after_routing(const CommonInfo& info, int u1, int u2,
                                            const Policy& policy) {
  switch (policy.kind()) {
    case PolicyKind::kG0:
      if (u1 != 0 || u2 != 0) throw ZeroProbabilityEvent("g0 never routes");
      return {info.pibar1, info.pibar2};
    case PolicyKind::kGhat:
      return {shift_by_routing(condition_on_action(info.pibar1, u1, info.threshold), u1, u2),
              shift_by_routing(condition_on_action(info.pibar2, u2, info.threshold), u2, u1)};
    case PolicyKind::kGtilde: {
      auto routes_above = [](double other_mean) {
        return [other_mean](int x) {
          return x > 0 && static_cast<double>(x) + kMeanTieTolerance >= other_mean;
        };
      };
      return {shift_by_routing(condition_on_routing(info.pibar1, u1, routes_above(info.pibar2.mean())),
                               u1, u2),
              shift_by_routing(condition_on_routing(info.pibar2, u2, routes_above(info.pibar1.mean())),
                               u2, u1)};
    }
    case PolicyKind::kCustom:
      break;
  }
  throw UnsupportedConditioning("policy '" + policy.name() +
                                "' has no declared conditioning events for the belief update");
}

CommonInfo advance_common_info(const CommonInfo& info, int u1, int u2, const ModelParams& params,
                               const Policy& policy) {
  auto [pi1, pi2] = posterior_after_routing(info, u1, u2, policy);
  return common_info_from_prior(pi1, pi2, params);
}

}  // namespace sigroute
