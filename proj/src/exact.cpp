#include "sigroute/exact.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "sigroute/errors.hpp"

namespace sigroute {

void ExactEvalConfig::validate() const {
  if (horizon < 1) throw ParameterError("horizon must be >= 1");
  params.validate();
  if (!pi1.is_normalized(1e-9) || !pi2.is_normalized(1e-9)) {
    throw InvalidPmf("initial beliefs must be normalized");
  }
  cost.validate();
  if (state_cap != 0 && state_cap < required_state_cap()) {
    throw ParameterError("state cap " + std::to_string(state_cap) + " truncates reachable states (need >= " +
                         std::to_string(required_state_cap()) + ")");
  }
}

int ExactEvalConfig::required_state_cap() const {
  return pi1.max_support() + pi2.max_support() + 2 * (horizon - 1);
}

namespace {

void add_to_law(std::vector<double>& law, int s, double w) {
  if (static_cast<std::size_t>(s) >= law.size()) law.resize(static_cast<std::size_t>(s) + 1, 0.0);
  law[static_cast<std::size_t>(s)] += w;
}

// Node of the layered enumeration: joint lengths plus an index into the
// layer's table of distinct common-information records.
using NodeKey = std::tuple<int, int, int>;

ExactResult layered(const Policy& policy, const ExactEvalConfig& cfg) {
  const SlotLaw law(cfg.params);
  ExactResult res;

  std::vector<CommonInfo> infos{common_info_from_prior(cfg.pi1, cfg.pi2, cfg.params)};
  res.threshold0 = infos.front().threshold;

  std::map<NodeKey, double> layer;
  for (int x1 = cfg.pi1.min_support(); x1 <= cfg.pi1.max_support(); ++x1) {
    for (int x2 = cfg.pi2.min_support(); x2 <= cfg.pi2.max_support(); ++x2) {
      const double w = cfg.pi1[x1] * cfg.pi2[x2];
      if (w > 0.0) layer[{x1, x2, 0}] += w;
    }
  }

  for (int t = 0; t < cfg.horizon; ++t) {
    if (layer.size() > cfg.budget) throw BudgetExceeded("layered enumeration", layer.size());
    std::vector<double> sums;
    for (const auto& [key, w] : layer) {
      const auto [x1, x2, id] = key;
      res.cost += w * stage_cost(x1, x2, cfg.cost, t);
      add_to_law(sums, x1 + x2, w);
    }
    res.sum_law.push_back(std::move(sums));
    if (t + 1 == cfg.horizon) break;

    std::vector<CommonInfo> next_infos;
    std::map<std::tuple<int, int, int>, int> child_id;  // (id, u1, u2) -> next id
    std::map<NodeKey, double> next;
    for (const auto& [key, w] : layer) {
      const auto [x1, x2, id] = key;
      const CommonInfo& info = infos[static_cast<std::size_t>(id)];
      for (const SlotOutcome& o1 : law) {
        const int xbar1 = step_queue(x1, o1.departure, o1.arrival);
        for (const SlotOutcome& o2 : law) {
          const int xbar2 = step_queue(x2, o2.departure, o2.arrival);
          ++res.work;
          const auto [u1, u2] = policy.decide_both(xbar1, xbar2, info, t);
          const Lengths after = apply_routing(xbar1, xbar2, u1, u2);
          auto [it, inserted] = child_id.try_emplace({id, u1, u2}, static_cast<int>(next_infos.size()));
          if (inserted) {
            next_infos.push_back(advance_common_info(info, u1, u2, cfg.params, policy));
          }
          next[{after.x1, after.x2, it->second}] += w * o1.prob * o2.prob;
        }
      }
    }
    infos = std::move(next_infos);
    layer = std::move(next);
  }
  for (const auto& [key, w] : layer) res.total_weight += w;
  return res;
}

struct RawWalker {
  const Policy& policy;
  const ExactEvalConfig& cfg;
  SlotLaw law;
  ExactResult& res;

  void walk(int t, int x1, int x2, const Pmf& prior1, const Pmf& prior2, double w, double path_cost) {
    path_cost += stage_cost(x1, x2, cfg.cost, t);
    if (t + 1 == cfg.horizon) {
      if (++res.work > cfg.budget) throw BudgetExceeded("raw path enumeration", res.work);
      res.cost += w * path_cost;
      res.total_weight += w;
      return;
    }
    // Recomputed on every path on purpose: this mode shares nothing.
    const CommonInfo info = common_info_from_prior(prior1, prior2, cfg.params);
    for (const SlotOutcome& o1 : law) {
      const int xbar1 = step_queue(x1, o1.departure, o1.arrival);
      for (const SlotOutcome& o2 : law) {
        const int xbar2 = step_queue(x2, o2.departure, o2.arrival);
        const auto [u1, u2] = policy.decide_both(xbar1, xbar2, info, t);
        const Lengths after = apply_routing(xbar1, xbar2, u1, u2);
        const auto [post1, post2] = posterior_after_routing(info, u1, u2, policy);
        walk(t + 1, after.x1, after.x2, post1, post2, w * o1.prob * o2.prob, path_cost);
      }
    }
  }
};

ExactResult raw_paths(const Policy& policy, const ExactEvalConfig& cfg) {
  ExactResult res;
  res.threshold0 = common_info_from_prior(cfg.pi1, cfg.pi2, cfg.params).threshold;
  RawWalker walker{policy, cfg, SlotLaw(cfg.params), res};
  for (int x1 = cfg.pi1.min_support(); x1 <= cfg.pi1.max_support(); ++x1) {
    for (int x2 = cfg.pi2.min_support(); x2 <= cfg.pi2.max_support(); ++x2) {
      const double w = cfg.pi1[x1] * cfg.pi2[x2];
      if (w > 0.0) walker.walk(0, x1, x2, cfg.pi1, cfg.pi2, w, 0.0);
    }
  }
  return res;
}

constexpr std::array<std::pair<int, int>, 4> kActionOrder{{{0, 0}, {1, 0}, {0, 1}, {1, 1}}};
constexpr std::uint8_t kUndefined = 255;

}  // namespace

ExactResult exact_finite_cost(const Policy& policy, const ExactEvalConfig& config, EnumerationMode mode) {
  config.validate();
  return mode == EnumerationMode::kLayered ? layered(policy, config) : raw_paths(policy, config);
}

ActionTable::ActionTable(int horizon, int cap)
    : decisions_(std::max(horizon - 1, 0)),
      cap_(cap),
      codes_(static_cast<std::size_t>(decisions_) * static_cast<std::size_t>(cap + 1) *
                 static_cast<std::size_t>(cap + 1),
             kUndefined) {}

std::size_t ActionTable::index(int t, int xbar1, int xbar2) const {
  if (t < 0 || t >= decisions_ || xbar1 < 0 || xbar2 < 0 || xbar1 > cap_ || xbar2 > cap_) {
    throw ParameterError("action table index out of range");
  }
  const auto n = static_cast<std::size_t>(cap_ + 1);
  return (static_cast<std::size_t>(t) * n + static_cast<std::size_t>(xbar1)) * n + static_cast<std::size_t>(xbar2);
}

bool ActionTable::defined(int t, int xbar1, int xbar2) const { return codes_[index(t, xbar1, xbar2)] != kUndefined; }

std::pair<int, int> ActionTable::action(int t, int xbar1, int xbar2) const {
  const std::uint8_t code = codes_[index(t, xbar1, xbar2)];
  if (code == kUndefined) throw ParameterError("no action recorded for an unreachable state");
  return kActionOrder[code];
}

void ActionTable::set(int t, int xbar1, int xbar2, int code) {
  codes_[index(t, xbar1, xbar2)] = static_cast<std::uint8_t>(code);
}

DpResult centralized_dp(const ExactEvalConfig& config) {
  config.validate();
  const int T = config.horizon;
  const int cap = config.state_cap != 0 ? config.state_cap : config.required_state_cap();
  const int base = config.pi1.max_support() + config.pi2.max_support();
  const auto n = static_cast<std::size_t>(cap + 1);
  const double inf = std::numeric_limits<double>::infinity();
  const SlotLaw law(config.params);

  DpResult res;
  res.state_cap = cap;
  res.actions = ActionTable(T, cap);

  // value[x1 * n + x2]: optimal cost-to-go from post-routing state (x1, x2) at
  // time t. Only states whose total is reachable by time t are filled.
  std::vector<double> value(n * n, inf);
  auto fill_terminal = [&](int t) {
    for (int x1 = 0; x1 <= cap; ++x1) {
      for (int x2 = 0; x2 <= cap && x1 + x2 <= base + 2 * t; ++x2) {
        value[static_cast<std::size_t>(x1) * n + static_cast<std::size_t>(x2)] = stage_cost(x1, x2, config.cost, t);
      }
    }
  };
  fill_terminal(T - 1);

  std::vector<double> q(n * n, inf);
  for (int t = T - 2; t >= 0; --t) {
    const int reach = base + 2 * t + 2;  // pre-decision total at time t
    std::fill(q.begin(), q.end(), inf);
    for (int b1 = 0; b1 <= cap; ++b1) {
      for (int b2 = 0; b2 <= cap && b1 + b2 <= reach; ++b2) {
        double best = inf;
        int best_code = 0;
        for (int code = 0; code < 4; ++code) {
          const auto [u1, u2] = kActionOrder[static_cast<std::size_t>(code)];
          if ((u1 == 1 && b1 == 0) || (u2 == 1 && b2 == 0)) continue;
          const Lengths after{b1 - u1 + u2, b2 - u2 + u1};
          if (after.x1 > cap || after.x2 > cap) continue;
          const double v = value[static_cast<std::size_t>(after.x1) * n + static_cast<std::size_t>(after.x2)];
          // Strict improvement beyond rounding keeps the earlier action on ties.
          if (best == inf ? v < inf : v < best - 1e-12 * std::max(1.0, std::abs(best))) {
            best = v;
            best_code = code;
          }
        }
        q[static_cast<std::size_t>(b1) * n + static_cast<std::size_t>(b2)] = best;
        res.actions.set(t, b1, b2, best_code);
      }
    }
    std::vector<double> cur(n * n, inf);
    for (int x1 = 0; x1 <= cap; ++x1) {
      for (int x2 = 0; x2 <= cap && x1 + x2 <= base + 2 * t; ++x2) {
        double expected = 0.0;
        for (const SlotOutcome& o1 : law) {
          const int b1 = step_queue(x1, o1.departure, o1.arrival);
          for (const SlotOutcome& o2 : law) {
            const int b2 = step_queue(x2, o2.departure, o2.arrival);
            expected += o1.prob * o2.prob * q[static_cast<std::size_t>(b1) * n + static_cast<std::size_t>(b2)];
          }
        }
        cur[static_cast<std::size_t>(x1) * n + static_cast<std::size_t>(x2)] =
            stage_cost(x1, x2, config.cost, t) + expected;
      }
    }
    value = std::move(cur);
  }

  for (int x1 = config.pi1.min_support(); x1 <= config.pi1.max_support(); ++x1) {
    for (int x2 = config.pi2.min_support(); x2 <= config.pi2.max_support(); ++x2) {
      const double w = config.pi1[x1] * config.pi2[x2];
      if (w > 0.0) res.cost += w * value[static_cast<std::size_t>(x1) * n + static_cast<std::size_t>(x2)];
    }
  }
  return res;
}

bool DominanceReport::holds() const {
  return std::all_of(checks.begin(), checks.end(), [](const DominanceCheck& c) { return c.holds; });
}

DominanceReport verify_dominance_smallcase(std::span<const Policy> comparisons, const ExactEvalConfig& config,
                                           double tol) {
  const ExactResult ref = exact_finite_cost(Policy::ghat(), config);
  auto tail = [](const std::vector<double>& law, int a) {
    double s = 0.0;
    for (std::size_t k = static_cast<std::size_t>(std::max(a, 0)); k < law.size(); ++k) s += law[k];
    return s;
  };
  DominanceReport report;
  for (const Policy& other : comparisons) {
    const ExactResult cmp = exact_finite_cost(other, config);
    DominanceCheck check;
    check.policy = other.name();
    check.max_excess = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < config.horizon; ++t) {
      const auto& a_law = ref.sum_law[static_cast<std::size_t>(t)];
      const auto& b_law = cmp.sum_law[static_cast<std::size_t>(t)];
      const int top = static_cast<int>(std::max(a_law.size(), b_law.size()));
      for (int a = 0; a <= top; ++a) {
        const double excess = tail(a_law, a) - tail(b_law, a);
        if (excess > check.max_excess) {
          check.max_excess = excess;
          check.worst_t = t;
          check.worst_a = a;
        }
      }
    }
    check.holds = check.max_excess <= tol;
    report.checks.push_back(check);
  }
  return report;
}

}  // namespace sigroute
