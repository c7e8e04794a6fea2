#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace sigroute {

// How the arrival and departure indicators of one queue are drawn within a
// slot. kIndependent: A ~ Bernoulli(lambda), D ~ Bernoulli(mu), independent.
// kExclusive: at most one event per queue per slot; arrival w.p. lambda,
// departure attempt w.p. mu, nothing otherwise (requires lambda + mu <= 1).
// The two queues are independent of each other under both conventions.
enum class Convention { kIndependent, kExclusive };

std::string to_string(Convention c);
Convention convention_from_string(const std::string& name);

struct ModelParams {
  double lambda = 0.0;
  double mu = 0.0;
  Convention convention = Convention::kIndependent;

  // Throws ParameterError unless both rates lie in [0,1] (and lambda+mu <= 1
  // under the exclusive convention).
  void validate() const;
  // validate() plus mu > lambda, needed by every infinite-horizon routine.
  void require_stable() const;
  bool interior() const { return lambda > 0 && lambda < 1 && mu > 0 && mu < 1; }
};

struct SlotOutcome {
  int arrival = 0;
  int departure = 0;
  double prob = 0.0;
};

// Per-queue law of (A, D) in one slot. Only outcomes with positive
// probability are listed, so images of supports are exact.
class SlotLaw {
 public:
  explicit SlotLaw(const ModelParams& params);

  const SlotOutcome* begin() const { return outcomes_.data(); }
  const SlotOutcome* end() const { return outcomes_.data() + size_; }
  int size() const { return size_; }

 private:
  std::array<SlotOutcome, 4> outcomes_{};
  int size_ = 0;
};

struct Primitives {
  int a1 = 0;
  int a2 = 0;
  int d1 = 0;
  int d2 = 0;
  friend bool operator==(const Primitives&, const Primitives&) = default;
};

struct Lengths {
  int x1 = 0;
  int x2 = 0;
  int sum() const { return x1 + x2; }
  friend bool operator==(const Lengths&, const Lengths&) = default;
};

struct SystemState {
  int x1 = 0;
  int x2 = 0;
  int xbar1 = 0;
  int xbar2 = 0;
};

// (x - d)^+ + a
constexpr int step_queue(int x, int departure, int arrival) {
  return (x - departure > 0 ? x - departure : 0) + arrival;
}

// Lengths after routing. Throws InfeasibleAction if a controller routes out
// of an empty queue.
Lengths apply_routing(int xbar1, int xbar2, int u1, int u2);

// ---------------------------------------------------------------------------
// Randomness.
//
// Every replication owns one engine per primitive process. Seeds are derived
// from (master seed, domain, replication, process) through SplitMix64:
//
//   s = mix(master ^ mix(domain << 32 | process) ^ mix(replication + golden))
//
// so that any process of any replication can be regenerated in isolation.
// Domains separate unrelated experiments sharing a master seed (e.g. the
// coupled system and the independent reference processes).

enum class Process : std::uint32_t {
  kArrival1 = 0,
  kArrival2 = 1,
  kDeparture1 = 2,
  kDeparture2 = 3,
  kInitial = 4,
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t domain, std::uint64_t replication,
                          Process process);

// Uniform in [0,1) built from the top 53 bits, so draws are identical across
// standard libraries.
inline double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}
inline int bernoulli(std::mt19937_64& engine, double p) { return uniform01(engine) < p ? 1 : 0; }

class PrimitiveStreams {
 public:
  PrimitiveStreams(std::uint64_t master, std::uint64_t replication, std::uint64_t domain = 0);

  std::mt19937_64& engine(Process p) { return engines_[static_cast<std::size_t>(p)]; }

 private:
  std::array<std::mt19937_64, 5> engines_;
};

// Draws (a1, a2, d1, d2). Under kExclusive each queue's single categorical
// draw comes from that queue's arrival stream.
Primitives sample_primitives(PrimitiveStreams& streams, const ModelParams& params);

// ---------------------------------------------------------------------------
// Costs.

// Polynomial with non-negative coefficients, c(x) = sum_k coeffs[k] x^k.
// Covers the registry: zero, linear (identity), square, poly:<c0,c1,...>.
class CostFunction {
 public:
  CostFunction() = default;
  static CostFunction zero();
  static CostFunction linear();
  static CostFunction square();
  static CostFunction polynomial(std::vector<double> coeffs);
  // "zero" | "linear" | "square" | "poly:c0,c1,..."
  static CostFunction parse(const std::string& spec);

  double operator()(std::int64_t x) const;
  const std::string& name() const { return name_; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  bool is_zero() const;

  // Checks increasing and convex on {0..range}; throws ParameterError.
  void validate(int range) const;

 private:
  std::vector<double> coeffs_;
  std::string name_ = "zero";
};

// Horizon-indexed cost: period t uses schedule[min(t, size-1)].
class CostModel {
 public:
  CostModel() : schedule_{CostFunction::zero()} {}
  explicit CostModel(CostFunction stationary) : schedule_{std::move(stationary)} {}
  explicit CostModel(std::vector<CostFunction> schedule);
  // Semicolon separated list of CostFunction specs, e.g. "zero;square".
  static CostModel parse(const std::string& spec);

  const CostFunction& at(int t) const;
  const std::vector<CostFunction>& schedule() const { return schedule_; }
  bool stationary() const { return schedule_.size() == 1; }
  std::string name() const;

  void validate(int range = 1000) const;

 private:
  std::vector<CostFunction> schedule_;
};

// c_t(x1) + c_t(x2)
double stage_cost(int x1, int x2, const CostModel& cost, int t);

}  // namespace sigroute
