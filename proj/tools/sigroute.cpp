// Command-line front end: simulate, exact, steady, compare, t0.
//
// Every option lives on the top-level app and subcommands fall through to
// it, so a flat key=value config file (--config) can set any of them. Flags
// given on the command line override the file.
//
// Exit status: 0 pass, 1 invariant violation or failed check, 2 usage error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

#include "sigroute/coupling.hpp"
#include "sigroute/errors.hpp"
#include "sigroute/exact.hpp"
#include "sigroute/harness.hpp"
#include "sigroute/io.hpp"
#include "sigroute/steady.hpp"

namespace {

using nlohmann::json;
using namespace sigroute;

constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

struct Options {
  double lambda = 0.1;
  double mu = 0.5;
  std::string policy = "ghat";
  int horizon = 1000;
  long long replications = 1;
  std::uint64_t seed = 1;
  std::string cost = "linear";
  std::string init = "eq:0";
  std::string out;
  std::string format = "json";
  std::string convention;
  int cap = 500;
  int threads = 0;
  bool coupling = false;
  bool dp = false;
  bool infinite = false;
};

std::vector<Convention> conventions(const Options& o, Convention fallback) {
  if (o.convention.empty()) return {fallback};
  if (o.convention == "both") return {Convention::kIndependent, Convention::kExclusive};
  return {convention_from_string(o.convention)};
}

ModelParams params_of(const Options& o, Convention c) {
  ModelParams p{o.lambda, o.mu, c};
  p.validate();
  return p;
}

// Writes to --out when given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

ExperimentConfig experiment_of(const Options& o, const InitSpec& init) {
  ExperimentConfig cfg;
  cfg.params = params_of(o, conventions(o, Convention::kIndependent).front());
  cfg.policy = o.policy;
  cfg.pi1 = init.pi1;
  cfg.pi2 = init.pi2;
  cfg.initial = init.initial;
  cfg.horizon = o.horizon;
  cfg.replications = o.replications;
  cfg.seed = o.seed;
  cfg.cost = CostModel::parse(o.cost);
  cfg.threads = o.threads;
  return cfg;
}

int cmd_simulate(const Options& o) {
  ExperimentConfig cfg = experiment_of(o, parse_init(o.init));
  cfg.running_average = o.infinite;
  if (o.format != "json" && o.format != "csv") throw ConfigError("format must be csv or json");
  cfg.keep_traces = o.format == "csv";
  const RunSummary s = run_experiment(cfg);
  Sink sink(o.out);
  const json summary = summary_to_json(cfg, s);
  if (cfg.keep_traces) {
    write_trace_csv(sink.stream(), s.traces);
    std::cerr << summary.dump() << "\n";
  } else {
    sink.stream() << summary.dump(2) << "\n";
  }
  return s.passed() ? 0 : kExitViolation;
}

int cmd_exact(const Options& o) {
  const InitSpec init = parse_init(o.init);
  std::vector<std::string> policies{"ghat", "g0", "gtilde"};
  if (o.policy != "all") policies = {o.policy};
  json records = json::array();
  // Both conventions unless one is named.
  const std::vector<Convention> cs =
      o.convention.empty() ? std::vector<Convention>{Convention::kIndependent, Convention::kExclusive}
                           : conventions(o, Convention::kIndependent);
  for (Convention c : cs) {
    ExactEvalConfig cfg;
    cfg.horizon = o.horizon;
    cfg.params = params_of(o, c);
    cfg.pi1 = init.pi1;
    cfg.pi2 = init.pi2;
    cfg.cost = CostModel::parse(o.cost);
    for (const std::string& name : policies) {
      const ExactResult r = exact_finite_cost(Policy::from_name(name), cfg);
      records.push_back({{"policy", name},
                         {"horizon", cfg.horizon},
                         {"cost", r.cost},
                         {"convention", to_string(c)},
                         {"threshold0", r.threshold0.to_string()},
                         {"total_weight", r.total_weight}});
    }
    if (o.dp) {
      const DpResult d = centralized_dp(cfg);
      records.push_back({{"policy", "centralized"},
                         {"horizon", cfg.horizon},
                         {"cost", d.cost},
                         {"convention", to_string(c)},
                         {"state_cap", d.state_cap}});
    }
  }
  Sink sink(o.out);
  sink.stream() << records.dump(2) << "\n";
  return 0;
}

int cmd_steady(const Options& o) {
  const ModelParams p = params_of(o, conventions(o, Convention::kIndependent).front());
  const CostModel cost = CostModel::parse(o.cost);
  const SteadyCost ghat = infinite_cost_ghat(p, cost, o.cap);
  const SteadyCost g0 = infinite_cost_g0(p, cost, o.cap);
  const json out = {{"lambda", p.lambda},
                    {"mu", p.mu},
                    {"convention", to_string(p.convention)},
                    {"cost_name", cost.name()},
                    {"j_ghat", ghat.value},
                    {"j_g0", g0.value},
                    {"cap", o.cap},
                    {"tail_mass", std::max(ghat.tail_mass, g0.tail_mass)},
                    {"residual", std::max(ghat.residual, g0.residual)}};
  Sink sink(o.out);
  sink.stream() << out.dump(2) << "\n";
  return ghat.value <= g0.value + 1e-12 ? 0 : kExitViolation;
}

int cmd_compare(const Options& o) {
  const InitSpec init = parse_init(o.init);
  Sink sink(o.out);
  if (o.coupling) {
    CouplingConfig cfg;
    cfg.params = params_of(o, conventions(o, Convention::kIndependent).front());
    cfg.pi1 = init.pi1;
    cfg.pi2 = init.pi2;
    cfg.cost = CostModel::parse(o.cost);
    cfg.horizon = o.horizon;
    cfg.replications = o.replications;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    const CouplingReport r = run_coupling(cfg);
    sink.stream() << coupling_to_json(cfg, r).dump(2) << "\n";
    return r.violations() == 0 && r.tv_ok() ? 0 : kExitViolation;
  }
  // Same seeds for every policy: differences are paired.
  json out = json::array();
  bool passed = true;
  for (const std::string name : {"ghat", "gtilde", "g0"}) {
    Options each = o;
    each.policy = name;
    const ExperimentConfig cfg = experiment_of(each, init);
    const RunSummary s = run_experiment(cfg);
    passed = passed && s.passed();
    out.push_back(summary_to_json(cfg, s));
  }
  sink.stream() << out.dump(2) << "\n";
  return passed ? 0 : kExitViolation;
}

int cmd_t0(const Options& o) {
  Options each = o;
  each.policy = "ghat";
  const ExperimentConfig cfg = experiment_of(each, parse_init(o.init));
  const T0Report r = measure_t0(cfg);
  json hist = json::object();
  for (const auto& [t, n] : r.histogram) hist[std::to_string(t)] = n;
  const json out = {{"replications", r.replications},
                    {"horizon", cfg.horizon},
                    {"histogram", hist},
                    {"censored", r.censored},
                    {"censored_fraction", r.censored_fraction()},
                    {"post_t0_gap_violations", r.post_t0_gap_violations}};
  Sink sink(o.out);
  sink.stream() << out.dump(2) << "\n";
  return r.censored == 0 && r.post_t0_gap_violations == 0 ? 0 : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-queue decentralized routing lab"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value file; command-line flags override it");

  Options o;
  app.add_option("--lambda", o.lambda, "arrival probability per slot")->capture_default_str();
  app.add_option("--mu", o.mu, "departure probability per slot")->capture_default_str();
  app.add_option("--policy", o.policy, "ghat|g0|gtilde (exact also accepts all)")->capture_default_str();
  app.add_option("--horizon", o.horizon, "number of charged periods")->capture_default_str();
  app.add_option("--replications", o.replications)->capture_default_str();
  app.add_option("--seed", o.seed, "master seed")->capture_default_str();
  app.add_option("--cost", o.cost, "zero|linear|square|poly:c0,c1,...; ';' separates periods")->capture_default_str();
  app.add_option("--init", o.init, "eq:<x0> or a JSON file with pi1/pi2")->capture_default_str();
  app.add_option("--out", o.out, "output path (stdout if empty)");
  app.add_option("--format", o.format, "csv|json")->capture_default_str();
  app.add_option("--convention", o.convention, "independent|exclusive|both");
  app.add_option("--cap", o.cap, "state truncation for the steady-state chains")->capture_default_str();
  app.add_option("--threads", o.threads, "worker threads, 0 for all cores")->capture_default_str();
  app.add_flag("--coupling", o.coupling, "compare: run the coupled-process oracle");
  app.add_flag("--dp", o.dp, "exact: also report the centralized optimum");
  app.add_flag("--infinite", o.infinite, "simulate: report running averages");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo replications with online invariant checks");
  auto* exact = app.add_subcommand("exact", "exact finite-horizon costs by enumeration");
  auto* steady = app.add_subcommand("steady", "infinite-horizon average costs from stationary laws");
  auto* compare = app.add_subcommand("compare", "paired policy comparison or coupling oracle");
  auto* t0 = app.add_subcommand("t0", "empirical law of the balancing time");
  for (auto* sub : {simulate, exact, steady, compare, t0}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(o);
    if (*exact) return cmd_exact(o);
    if (*steady) return cmd_steady(o);
    if (*compare) return cmd_compare(o);
    if (*t0) return cmd_t0(o);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitViolation;
  }
  return kExitUsage;
}
