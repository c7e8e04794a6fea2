#include "sigroute/io.hpp"

#include <cstdio>
#include <fstream>

#include "sigroute/errors.hpp"

namespace sigroute {

using nlohmann::json;

json pmf_to_json(const Pmf& p) { return json(p.dense()); }

Pmf pmf_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("a pmf must be a non-empty JSON array of probabilities");
  std::vector<double> probs;
  probs.reserve(j.size());
  for (const json& v : j) {
    if (!v.is_number()) throw ConfigError("pmf entries must be numbers");
    probs.push_back(v.get<double>());
  }
  try {
    return Pmf::from_dense(std::move(probs));
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid pmf: ") + e.what());
  }
}

InitSpec parse_init_json(const json& j) {
  InitSpec spec;
  if (j.is_array() && j.size() == 2) {
    spec.pi1 = pmf_from_json(j[0]);
    spec.pi2 = pmf_from_json(j[1]);
    return spec;
  }
  if (!j.is_object() || !j.contains("pi1") || !j.contains("pi2")) {
    throw ConfigError("init must be {\"pi1\": [...], \"pi2\": [...]} or [[...], [...]]");
  }
  spec.pi1 = pmf_from_json(j.at("pi1"));
  spec.pi2 = pmf_from_json(j.at("pi2"));
  if (j.contains("x0")) {
    const json& x0 = j.at("x0");
    if (!x0.is_array() || x0.size() != 2) throw ConfigError("x0 must be [x1, x2]");
    spec.initial = Lengths{x0[0].get<int>(), x0[1].get<int>()};
  }
  return spec;
}

InitSpec parse_init(const std::string& arg) {
  if (arg.rfind("eq:", 0) == 0) {
    int x0 = 0;
    try {
      std::size_t used = 0;
      x0 = std::stoi(arg.substr(3), &used);
      if (used != arg.size() - 3) throw std::invalid_argument(arg);
    } catch (const std::exception&) {
      throw ConfigError("bad equal start '" + arg + "', expected eq:<x0>");
    }
    if (x0 < 0) throw ConfigError("initial length must be >= 0");
    return {Pmf::point(x0), Pmf::point(x0), Lengths{x0, x0}};
  }
  std::ifstream in(arg);
  if (!in) throw ConfigError("cannot open init file '" + arg + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("init file '" + arg + "': " + e.what());
  }
  return parse_init_json(j);
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << "# schema: " << kTraceSchema << "\n";
  out << "rep,t,x1,x2,xbar1,xbar2,u1,u2,a1,a2,d1,d2,lb,ub,lbbar,ubbar,threshold,stage_cost\n";
  char cost[32];
  for (const TraceRecord& r : trace) {
    std::snprintf(cost, sizeof cost, "%.17g", r.stage_cost);
    out << r.rep << ',' << r.t << ',' << r.x1 << ',' << r.x2 << ',' << r.xbar1 << ',' << r.xbar2 << ',' << r.u1
        << ',' << r.u2 << ',' << r.a1 << ',' << r.a2 << ',' << r.d1 << ',' << r.d2 << ',' << r.lb << ',' << r.ub
        << ',' << r.lbbar << ',' << r.ubbar << ',' << r.threshold.to_string() << ',' << cost << '\n';
  }
}

namespace {

json counts_to_json(const InvariantCounts& c) {
  return {{"bound_mismatches", c.bound_mismatches},
          {"bound_mismatches_with_gaps", c.bound_mismatches_with_gaps},
          {"containment_violations", c.containment_violations},
          {"barred_violations", c.barred_violations},
          {"shrink_violations", c.shrink_violations},
          {"shrink_violations_from_zero", c.shrink_violations_from_zero},
          {"halving_violations", c.halving_violations},
          {"post_t0_gap_violations", c.post_t0_gap_violations},
          {"balancing_violations", c.balancing_violations},
          {"s_identity_mismatches", c.s_identity_mismatches},
          {"support_violations", c.support_violations}};
}

}  // namespace

json summary_to_json(const ExperimentConfig& config, const RunSummary& s) {
  json t0 = json::object();
  for (const auto& [t, n] : s.t0_histogram) t0[std::to_string(t)] = n;
  json running = json::array();
  for (const auto& [t, w] : s.running) running.push_back({t, w});
  return {{"schema", kSummarySchema},
          {"policy", config.policy},
          {"lambda", config.params.lambda},
          {"mu", config.params.mu},
          {"convention", to_string(config.params.convention)},
          {"cost", config.cost.name()},
          {"horizon", config.horizon},
          {"replications", s.replications},
          {"seed", config.seed},
          {"mean", s.mean},
          {"std_error", s.std_error},
          {"running_average", running},
          {"tail_spread", s.tail_spread},
          {"t0_histogram", t0},
          {"t0_censored", s.t0_censored},
          {"invariants", counts_to_json(s.counts)},
          {"failures", s.failures},
          {"passed", s.passed()}};
}

json coupling_to_json(const CouplingConfig& config, const CouplingReport& r) {
  json tv = json::array();
  for (const TvCheck& c : r.tv) {
    tv.push_back({{"t", c.t}, {"queue", c.queue + 1}, {"distance", c.distance}, {"band", c.band},
                  {"within", c.within()}});
  }
  json out = {{"schema", kSummarySchema},
              {"lambda", config.params.lambda},
              {"mu", config.params.mu},
              {"cost", config.cost.name()},
              {"horizon", config.horizon},
              {"paths", r.paths},
              {"steps", r.steps},
              {"swaps", r.swaps},
              {"sum_violations", r.sum_violations},
              {"max_violations", r.max_violations},
              {"cost_violations", r.cost_violations},
              {"tv", tv},
              {"passed", r.violations() == 0 && r.tv_ok()}};
  if (r.first_violation) {
    out["first_violation"] = {{"replication", r.first_violation->replication},
                              {"t", r.first_violation->t},
                              {"seed", r.first_violation->seed},
                              {"what", r.first_violation->what}};
  }
  return out;
}

}  // namespace sigroute
