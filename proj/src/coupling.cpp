#include "sigroute/coupling.hpp"

#include <cmath>
#include <map>

#include "sigroute/errors.hpp"
#include "sigroute/parallel.hpp"
#include "sigroute/policies.hpp"

namespace sigroute {

namespace {

CoupleStepResult step_unchecked(const CoupledState& s, const Primitives& w, const CommonInfo& info) {
  CoupleStepResult r;
  r.xbar1 = step_queue(s.x1, w.d1, w.a1);
  r.xbar2 = step_queue(s.x2, w.d2, w.a2);
  r.u1 = ghat_decide(r.xbar1, info);
  r.u2 = ghat_decide(r.xbar2, info);
  const Lengths x = apply_routing(r.xbar1, r.xbar2, r.u1, r.u2);

  const int mx = longer_index(s.x1, s.x2);
  const int my = longer_index(s.y1, s.y2);
  const std::array<int, 2> a{w.a1, w.a2};
  const std::array<int, 2> d{w.d1, w.d2};
  const std::array<int, 2> xs{s.x1, s.x2};
  const std::array<int, 2> ys{s.y1, s.y2};
  const int a_long = a[static_cast<std::size_t>(mx)];
  const int d_long = d[static_cast<std::size_t>(mx)];
  const int a_short = a[static_cast<std::size_t>(1 - mx)];
  const int d_short = d[static_cast<std::size_t>(1 - mx)];

  r.swapped = ys[static_cast<std::size_t>(my)] - 1 == xs[static_cast<std::size_t>(mx)] &&
              xs[static_cast<std::size_t>(mx)] == xs[static_cast<std::size_t>(1 - mx)] && a_long == 0 &&
              a_short == 1 && ((d_long == 1 && d_short == 0) || (d_long == 0 && d_short == 1));

  std::array<int, 2> ya{};
  std::array<int, 2> yd{};
  ya[static_cast<std::size_t>(my)] = a_long;
  ya[static_cast<std::size_t>(1 - my)] = a_short;
  yd[static_cast<std::size_t>(my)] = r.swapped ? d_short : d_long;
  yd[static_cast<std::size_t>(1 - my)] = r.swapped ? d_long : d_short;
  r.y_primitives = {ya[0], ya[1], yd[0], yd[1]};
  r.next = {x.x1, x.x2, step_queue(s.y1, yd[0], ya[0]), step_queue(s.y2, yd[1], ya[1])};
  return r;
}

using Histogram = std::vector<long long>;

void count(Histogram& h, int x) {
  if (static_cast<std::size_t>(x) >= h.size()) h.resize(static_cast<std::size_t>(x) + 1, 0);
  ++h[static_cast<std::size_t>(x)];
}

void merge(Histogram& into, const Histogram& from) {
  if (from.size() > into.size()) into.resize(from.size(), 0);
  for (std::size_t k = 0; k < from.size(); ++k) into[k] += from[k];
}

struct BlockResult {
  CouplingReport report;
  // [checkpoint][queue]
  std::vector<std::array<Histogram, 2>> coupled;
  std::vector<std::array<Histogram, 2>> reference;
};

TvCheck compare(const Histogram& a, const Histogram& b, long long n, int t, int queue) {
  TvCheck c;
  c.t = t;
  c.queue = queue;
  const std::size_t size = std::max(a.size(), b.size());
  const auto nd = static_cast<double>(n);
  for (std::size_t k = 0; k < size; ++k) {
    const double p = k < a.size() ? static_cast<double>(a[k]) / nd : 0.0;
    const double q = k < b.size() ? static_cast<double>(b[k]) / nd : 0.0;
    const double pooled = 0.5 * (p + q);
    c.distance += 0.5 * std::abs(p - q);
    c.band += 0.5 * 3.0 * std::sqrt(2.0 * pooled * (1.0 - pooled) / nd);
  }
  return c;
}

void run_block(const CouplingConfig& cfg, long long begin, long long end, BlockResult& out) {
  const Policy ghat = Policy::ghat();
  const CommonInfo initial_info = common_info_from_prior(cfg.pi1, cfg.pi2, cfg.params);
  out.coupled.resize(cfg.checkpoints.size());
  out.reference.resize(cfg.checkpoints.size());
  CouplingReport& rep = out.report;

  auto record_violation = [&](long long r, int t, const std::string& what) {
    if (!rep.first_violation) rep.first_violation = CouplingViolation{r, t, cfg.seed, what};
  };

  for (long long r = begin; r < end; ++r) {
    PrimitiveStreams streams(cfg.seed, static_cast<std::uint64_t>(r), 0);
    const int x1 = cfg.pi1.quantile(uniform01(streams.engine(Process::kInitial)));
    const int x2 = cfg.pi2.quantile(uniform01(streams.engine(Process::kInitial)));
    CoupledState s{x1, x2, x1, x2};
    CommonInfo info = initial_info;

    PrimitiveStreams ref_streams(cfg.seed, static_cast<std::uint64_t>(r), 1);
    int g1 = cfg.pi1.quantile(uniform01(ref_streams.engine(Process::kInitial)));
    int g2 = cfg.pi2.quantile(uniform01(ref_streams.engine(Process::kInitial)));

    for (int t = 0;; ++t) {
      const CostFunction& c = cfg.cost.at(t);
      if (c(s.x1) + c(s.x2) > c(s.y1) + c(s.y2)) {
        ++rep.cost_violations;
        record_violation(r, t, "cost dominance");
      }
      if (cfg.distribution_check) {
        for (std::size_t k = 0; k < cfg.checkpoints.size(); ++k) {
          if (cfg.checkpoints[k] != t) continue;
          count(out.coupled[k][0], s.y1);
          count(out.coupled[k][1], s.y2);
          count(out.reference[k][0], g1);
          count(out.reference[k][1], g2);
        }
      }
      if (t == cfg.horizon) break;

      const Primitives w = sample_primitives(streams, cfg.params);
      const CoupleStepResult step = step_unchecked(s, w, info);
      ++rep.steps;
      if (step.swapped) ++rep.swaps;
      if (!step.next.sum_dominated()) {
        ++rep.sum_violations;
        record_violation(r, t + 1, "sum dominance");
      }
      if (!step.next.max_dominated()) {
        ++rep.max_violations;
        record_violation(r, t + 1, "max dominance");
      }
      info = advance_common_info(info, step.u1, step.u2, cfg.params, ghat);
      s = step.next;

      if (cfg.distribution_check) {
        const Primitives v = sample_primitives(ref_streams, cfg.params);
        g1 = step_queue(g1, v.d1, v.a1);
        g2 = step_queue(g2, v.d2, v.a2);
      }
    }
    ++rep.paths;
  }
}

}  // namespace

CoupleStepResult couple_step(const CoupledState& state, const Primitives& w, const CommonInfo& info) {
  CoupleStepResult r = step_unchecked(state, w, info);
  if (!r.next.sum_dominated() || !r.next.max_dominated()) {
    throw InvariantViolation("coupled step broke dominance: x=(" + std::to_string(r.next.x1) + "," +
                             std::to_string(r.next.x2) + ") y=(" + std::to_string(r.next.y1) + "," +
                             std::to_string(r.next.y2) + ")");
  }
  return r;
}

void CouplingConfig::validate() const {
  params.validate();
  if (params.convention != Convention::kIndependent) {
    throw ParameterError("the coupling re-associates departures across queues and needs independent primitives");
  }
  if (!pi1.is_normalized(1e-9) || !pi2.is_normalized(1e-9)) throw InvalidPmf("initial beliefs must be normalized");
  if (horizon < 0) throw ParameterError("horizon must be >= 0");
  if (replications < 1) throw ParameterError("replications must be >= 1");
  cost.validate();
}

bool CouplingReport::tv_ok() const {
  return std::all_of(tv.begin(), tv.end(), [](const TvCheck& c) { return c.within(); });
}

CouplingReport run_coupling(const CouplingConfig& config) {
  config.validate();
  const int workers = std::min<long long>(resolve_threads(config.threads), config.replications);
  std::vector<BlockResult> blocks(static_cast<std::size_t>(workers));
  parallel_blocks(config.replications, workers,
                  [&](int b, long long begin, long long end) { run_block(config, begin, end, blocks[static_cast<std::size_t>(b)]); });

  CouplingReport out;
  std::vector<std::array<Histogram, 2>> coupled(config.checkpoints.size());
  std::vector<std::array<Histogram, 2>> reference(config.checkpoints.size());
  for (const BlockResult& b : blocks) {
    const CouplingReport& r = b.report;
    out.paths += r.paths;
    out.steps += r.steps;
    out.swaps += r.swaps;
    out.sum_violations += r.sum_violations;
    out.max_violations += r.max_violations;
    out.cost_violations += r.cost_violations;
    if (!out.first_violation && r.first_violation) out.first_violation = r.first_violation;
    for (std::size_t k = 0; k < config.checkpoints.size(); ++k) {
      for (std::size_t q = 0; q < 2; ++q) {
        if (k < b.coupled.size()) merge(coupled[k][q], b.coupled[k][q]);
        if (k < b.reference.size()) merge(reference[k][q], b.reference[k][q]);
      }
    }
  }
  if (config.distribution_check) {
    for (std::size_t k = 0; k < config.checkpoints.size(); ++k) {
      if (config.checkpoints[k] > config.horizon) continue;
      for (int q = 0; q < 2; ++q) {
        out.tv.push_back(compare(coupled[k][static_cast<std::size_t>(q)], reference[k][static_cast<std::size_t>(q)],
                                 out.paths, config.checkpoints[k], q));
      }
    }
  }
  return out;
}

CouplingReport verify_distribution_match(const ModelParams& params, const Pmf& pi1, const Pmf& pi2, int horizon,
                                         long long replications, std::uint64_t seed, int threads) {
  CouplingConfig cfg;
  cfg.params = params;
  cfg.pi1 = pi1;
  cfg.pi2 = pi2;
  cfg.cost = CostModel(CostFunction::zero());
  cfg.horizon = horizon;
  cfg.replications = replications;
  cfg.seed = seed;
  cfg.threads = threads;
  return run_coupling(cfg);
}

CouplingReport verify_cost_dominance(const ModelParams& params, const CostModel& cost, const Pmf& pi1,
                                     const Pmf& pi2, int horizon, long long replications, std::uint64_t seed,
                                     int threads) {
  CouplingConfig cfg;
  cfg.params = params;
  cfg.pi1 = pi1;
  cfg.pi2 = pi2;
  cfg.cost = cost;
  cfg.horizon = horizon;
  cfg.replications = replications;
  cfg.seed = seed;
  cfg.distribution_check = false;
  cfg.threads = threads;
  return run_coupling(cfg);
}

}  // namespace sigroute
