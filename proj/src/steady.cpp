#include "sigroute/steady.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "sigroute/errors.hpp"

namespace sigroute {

double ChainSpec::prob(int from, int to) const {
  const ChainRow& row = rows.at(static_cast<std::size_t>(from));
  const int k = to - row.lo;
  if (k < 0 || k >= static_cast<int>(row.probs.size())) return 0.0;
  return row.probs[static_cast<std::size_t>(k)];
}

double ChainSpec::mean_next(int from) const {
  const ChainRow& row = rows.at(static_cast<std::size_t>(from));
  double m = 0.0;
  for (std::size_t k = 0; k < row.probs.size(); ++k) m += row.probs[k] * (row.lo + static_cast<int>(k));
  return m;
}

void ChainSpec::validate() const {
  if (static_cast<int>(rows.size()) != size() || static_cast<int>(clipped.size()) != size()) {
    throw InvalidPmf("chain has " + std::to_string(rows.size()) + " rows for cap " + std::to_string(cap));
  }
  for (int s = 0; s <= cap; ++s) {
    const ChainRow& row = rows[static_cast<std::size_t>(s)];
    double sum = 0.0;
    for (double p : row.probs) {
      if (!(p >= 0.0)) throw InvalidPmf("negative transition probability in row " + std::to_string(s));
      sum += p;
    }
    if (row.lo < 0 || row.lo + static_cast<int>(row.probs.size()) - 1 > cap || std::abs(sum - 1.0) > 1e-12) {
      throw InvalidPmf("row " + std::to_string(s) + " is not a law on {0.." + std::to_string(cap) + "}");
    }
  }
}

namespace {

// Builds row s by enumerating both queues' slot outcomes from the
// representative pair `split(s)`.
ChainSpec build_from_pairs(const ModelParams& params, int cap, int queues,
                           const std::function<std::pair<int, int>(int)>& split) {
  params.require_stable();
  if (cap < 1) throw ParameterError("chain cap must be >= 1");
  const SlotLaw law(params);
  ChainSpec chain;
  chain.cap = cap;
  chain.rows.resize(static_cast<std::size_t>(cap) + 1);
  chain.clipped.assign(static_cast<std::size_t>(cap) + 1, 0.0);
  for (int s = 0; s <= cap; ++s) {
    const auto [x1, x2] = split(s);
    std::vector<double> dense(static_cast<std::size_t>(cap) + 1, 0.0);
    auto add = [&](int to, double p) {
      if (to > cap) {
        chain.clipped[static_cast<std::size_t>(s)] += p;
        to = cap;
      }
      dense[static_cast<std::size_t>(to)] += p;
    };
    for (const SlotOutcome& o1 : law) {
      const int n1 = step_queue(x1, o1.departure, o1.arrival);
      if (queues == 1) {
        add(n1, o1.prob);
        continue;
      }
      for (const SlotOutcome& o2 : law) add(n1 + step_queue(x2, o2.departure, o2.arrival), o1.prob * o2.prob);
    }
    const auto first = std::find_if(dense.begin(), dense.end(), [](double p) { return p != 0.0; });
    const auto last = std::find_if(dense.rbegin(), dense.rend(), [](double p) { return p != 0.0; }).base();
    ChainRow& row = chain.rows[static_cast<std::size_t>(s)];
    row.lo = static_cast<int>(first - dense.begin());
    row.probs.assign(first, last);
  }
  return chain;
}

// Strongly connected components (Kosaraju, iterative). Returns component id
// per state and the number of components.
std::pair<std::vector<int>, int> components(const ChainSpec& chain) {
  const int n = chain.size();
  auto successors = [&](int s, auto&& fn) {
    const ChainRow& row = chain.rows[static_cast<std::size_t>(s)];
    for (std::size_t k = 0; k < row.probs.size(); ++k) {
      if (row.probs[k] > 0.0) fn(row.lo + static_cast<int>(k));
    }
  };
  std::vector<std::vector<int>> reverse(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) successors(s, [&](int t) { reverse[static_cast<std::size_t>(t)].push_back(s); });

  std::vector<int> order;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int root = 0; root < n; ++root) {
    if (seen[static_cast<std::size_t>(root)]) continue;
    std::vector<std::pair<int, std::vector<int>>> stack;
    auto push = [&](int s) {
      seen[static_cast<std::size_t>(s)] = 1;
      std::vector<int> next;
      successors(s, [&](int t) { next.push_back(t); });
      stack.emplace_back(s, std::move(next));
    };
    push(root);
    while (!stack.empty()) {
      auto& [s, next] = stack.back();
      if (next.empty()) {
        order.push_back(s);
        stack.pop_back();
        continue;
      }
      const int t = next.back();
      next.pop_back();
      if (!seen[static_cast<std::size_t>(t)]) push(t);
    }
  }

  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  int count = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[static_cast<std::size_t>(*it)] != -1) continue;
    std::vector<int> stack{*it};
    comp[static_cast<std::size_t>(*it)] = count;
    while (!stack.empty()) {
      const int s = stack.back();
      stack.pop_back();
      for (int t : reverse[static_cast<std::size_t>(s)]) {
        if (comp[static_cast<std::size_t>(t)] == -1) {
          comp[static_cast<std::size_t>(t)] = count;
          stack.push_back(t);
        }
      }
    }
    ++count;
  }
  return {comp, count};
}

// States of the unique closed class.
std::vector<int> closed_class(const ChainSpec& chain) {
  const auto [comp, count] = components(chain);
  std::vector<char> leaks(static_cast<std::size_t>(count), 0);
  for (int s = 0; s < chain.size(); ++s) {
    const ChainRow& row = chain.rows[static_cast<std::size_t>(s)];
    for (std::size_t k = 0; k < row.probs.size(); ++k) {
      const int t = row.lo + static_cast<int>(k);
      if (row.probs[k] > 0.0 && comp[static_cast<std::size_t>(t)] != comp[static_cast<std::size_t>(s)]) {
        leaks[static_cast<std::size_t>(comp[static_cast<std::size_t>(s)])] = 1;
      }
    }
  }
  const auto closed = static_cast<int>(std::count(leaks.begin(), leaks.end(), 0));
  if (closed != 1) {
    throw ReducibleChain("chain has " + std::to_string(closed) + " closed classes; the invariant law is not unique");
  }
  const int target = static_cast<int>(std::find(leaks.begin(), leaks.end(), 0) - leaks.begin());
  std::vector<int> states;
  for (int s = 0; s < chain.size(); ++s) {
    if (comp[static_cast<std::size_t>(s)] == target) states.push_back(s);
  }
  return states;
}

std::vector<double> apply_kernel(const ChainSpec& chain, const std::vector<double>& pi) {
  std::vector<double> out(pi.size(), 0.0);
  for (int s = 0; s < chain.size(); ++s) {
    const double w = pi[static_cast<std::size_t>(s)];
    if (w == 0.0) continue;
    const ChainRow& row = chain.rows[static_cast<std::size_t>(s)];
    for (std::size_t k = 0; k < row.probs.size(); ++k) out[static_cast<std::size_t>(row.lo) + k] += w * row.probs[k];
  }
  return out;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

std::vector<double> dense_solve(const ChainSpec& chain, const std::vector<int>& states) {
  const auto m = static_cast<Eigen::Index>(states.size());
  std::vector<int> local(static_cast<std::size_t>(chain.size()), -1);
  for (Eigen::Index i = 0; i < m; ++i) local[static_cast<std::size_t>(states[static_cast<std::size_t>(i)])] = static_cast<int>(i);
  // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
  Eigen::MatrixXd a = -Eigen::MatrixXd::Identity(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const ChainRow& row = chain.rows[static_cast<std::size_t>(states[static_cast<std::size_t>(i)])];
    for (std::size_t k = 0; k < row.probs.size(); ++k) {
      const int j = local[static_cast<std::size_t>(row.lo) + k];
      if (j >= 0) a(j, i) += row.probs[k];
    }
  }
  a.row(m - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  b(m - 1) = 1.0;
  const Eigen::VectorXd x = a.partialPivLu().solve(b);
  std::vector<double> pi(static_cast<std::size_t>(chain.size()), 0.0);
  for (Eigen::Index i = 0; i < m; ++i) pi[static_cast<std::size_t>(states[static_cast<std::size_t>(i)])] = x(i);
  return pi;
}

std::vector<double> power_iterate(const ChainSpec& chain, const std::vector<int>& states, int max_iterations) {
  std::vector<double> pi(static_cast<std::size_t>(chain.size()), 0.0);
  for (int s : states) pi[static_cast<std::size_t>(s)] = 1.0 / static_cast<double>(states.size());
  for (int it = 0; it < max_iterations; ++it) {
    std::vector<double> next = apply_kernel(chain, pi);
    const double change = l1_distance(next, pi);
    pi = std::move(next);
    if (change <= 1e-13) return pi;
  }
  throw ConvergenceFailure("power iteration did not reach residual 1e-12 in " + std::to_string(max_iterations) +
                           " iterations");
}

constexpr double kNoiseFloor = 1e-14;

void normalize(std::vector<double>& pi) {
  double sum = 0.0;
  for (double p : pi) sum += p;
  for (double& p : pi) p /= sum;
}

}  // namespace

ChainSpec build_s_chain(const ModelParams& params, int cap) {
  return build_from_pairs(params, cap, 2, [](int s) { return std::pair{(s + 1) / 2, s / 2}; });
}

ChainSpec build_queue_chain(const ModelParams& params, int cap) {
  return build_from_pairs(params, cap, 1, [](int x) { return std::pair{x, 0}; });
}

StationaryResult stationary_distribution(const ChainSpec& chain, int max_iterations) {
  chain.validate();
  const std::vector<int> states = closed_class(chain);
  std::vector<double> pi = chain.size() <= kDenseSolveLimit + 1 ? dense_solve(chain, states)
                                                                 : power_iterate(chain, states, max_iterations);
  // Entries at rounding level are noise of the solve, not tail mass. Drop
  // them and let a few sweeps of the kernel rebuild the tail from the flow
  // out of the bulk, where products of positive terms keep relative accuracy.
  for (double& p : pi) {
    if (p < -1e-12) throw ConvergenceFailure("stationary solve produced mass " + std::to_string(p));
    if (p < kNoiseFloor) p = 0.0;
  }
  normalize(pi);
  for (int sweep = 0; sweep < chain.size(); ++sweep) pi = apply_kernel(chain, pi);
  normalize(pi);

  StationaryResult res;
  res.residual = l1_distance(apply_kernel(chain, pi), pi);
  if (res.residual > 1e-10) {
    throw ConvergenceFailure("stationary residual " + std::to_string(res.residual) + " exceeds 1e-10");
  }
  for (int s = 0; s < chain.size(); ++s) res.tail_mass += pi[static_cast<std::size_t>(s)] * chain.clipped[static_cast<std::size_t>(s)];
  res.distribution = Pmf::from_window(0, std::move(pi));
  return res;
}

namespace {

// Expected cost under `pi` of per-state cost `f`, with the truncation checks
// shared by both average-cost formulas.
SteadyCost average_cost(const ChainSpec& chain, const std::function<double(int)>& f) {
  const StationaryResult st = stationary_distribution(chain);
  SteadyCost out;
  out.cap = chain.cap;
  out.residual = st.residual;
  out.tail_mass = st.tail_mass;
  if (st.tail_mass > chain.tail_mass_bound) {
    throw DivergingCost("truncated tail mass " + std::to_string(st.tail_mass) + " exceeds bound at cap " +
                        std::to_string(chain.cap));
  }
  // Cauchy-style check: the last quarter of the partial sums must not move
  // the total.
  const int settle_from = chain.cap - chain.cap / 4;
  double tail = 0.0;
  for (int s = 0; s <= st.distribution.max_support(); ++s) {
    const double term = st.distribution[s] * f(s);
    out.value += term;
    if (s >= settle_from) tail += term;
  }
  if (!std::isfinite(out.value) || tail > 1e-9 * std::max(1.0, std::abs(out.value))) {
    throw DivergingCost("average cost partial sums not settled at cap " + std::to_string(chain.cap));
  }
  return out;
}

const CostFunction& stationary_cost(const CostModel& cost) {
  if (!cost.stationary()) throw ParameterError("average cost needs a stationary cost function");
  cost.validate();
  return cost.at(0);
}

}  // namespace

SteadyCost infinite_cost_ghat(const ModelParams& params, const CostModel& cost, int cap) {
  const CostFunction& c = stationary_cost(cost);
  return average_cost(build_s_chain(params, cap), [&c](int s) { return c(s / 2) + c((s + 1) / 2); });
}

SteadyCost infinite_cost_g0(const ModelParams& params, const CostModel& cost, int cap) {
  const CostFunction& c = stationary_cost(cost);
  SteadyCost out = average_cost(build_queue_chain(params, cap), [&c](int x) { return c(x); });
  out.value *= 2.0;
  return out;
}

}  // namespace sigroute
