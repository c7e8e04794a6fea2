#pragma once

#include <vector>

#include "sigroute/model.hpp"
#include "sigroute/pmf.hpp"

namespace sigroute {

// Row s of a transition kernel over {0..cap}: P(s -> lo + k) = probs[k].
struct ChainRow {
  int lo = 0;
  std::vector<double> probs;
};

// Truncated Markov kernel. Mass that would land above cap is put on cap and
// the amount is kept in clipped[s].
struct ChainSpec {
  int cap = 0;
  std::vector<ChainRow> rows;
  std::vector<double> clipped;
  double tail_mass_bound = 1e-10;

  int size() const { return cap + 1; }
  double prob(int from, int to) const;
  double mean_next(int from) const;
  // Rows are non-negative and sum to 1 within 1e-12; throws InvalidPmf.
  void validate() const;
};

// Kernel of the total number of customers when the threshold rule keeps the
// queues balanced: s' = step(ceil(s/2)) + step(floor(s/2)) with independent
// per-queue primitives. For s >= 2 this is s - D1 - D2 + A1 + A2, for s = 1
// a single effective departure, for s = 0 arrivals only. Requires mu > lambda.
ChainSpec build_s_chain(const ModelParams& params, int cap = 500);

// A single uncontrolled queue: x' = (x - D)^+ + A. Requires mu > lambda.
ChainSpec build_queue_chain(const ModelParams& params, int cap = 500);

struct StationaryResult {
  Pmf distribution;
  // ||pi P - pi||_1
  double residual = 0.0;
  // sum_s pi(s) * clipped[s]
  double tail_mass = 0.0;
};

inline constexpr int kDenseSolveLimit = 2000;

// Unique invariant law of the truncated chain. Dense LU up to
// kDenseSolveLimit states, power iteration above. The chain must have exactly
// one closed communicating class (transient states get probability 0);
// throws ReducibleChain otherwise and ConvergenceFailure if the iteration
// budget runs out.
StationaryResult stationary_distribution(const ChainSpec& chain, int max_iterations = 5'000'000);

struct SteadyCost {
  double value = 0.0;
  double tail_mass = 0.0;
  double residual = 0.0;
  int cap = 0;
};

// Average cost of the threshold rule: sum_s pi(s) (c(floor(s/2)) + c(ceil(s/2))).
// The cost must be stationary. Throws DivergingCost when the partial sums
// are not settled at the cap or the truncated tail is too heavy.
SteadyCost infinite_cost_ghat(const ModelParams& params, const CostModel& cost, int cap = 500);

// Average cost of never routing: 2 sum_x pi(x) c(x) for one uncontrolled queue.
SteadyCost infinite_cost_g0(const ModelParams& params, const CostModel& cost, int cap = 500);

}  // namespace sigroute
