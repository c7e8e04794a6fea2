#include "sigroute/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sigroute/errors.hpp"

namespace sigroute {

std::string to_string(Convention c) {
  return c == Convention::kIndependent ? "independent" : "exclusive";
}

Convention convention_from_string(const std::string& name) {
  if (name == "independent") return Convention::kIndependent;
  if (name == "exclusive") return Convention::kExclusive;
  throw ParameterError("unknown convention '" + name + "' (expected independent|exclusive)");
}

void ModelParams::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ParameterError("lambda must lie in [0,1], got " + std::to_string(lambda));
  }
  if (!(mu >= 0.0 && mu <= 1.0)) {
    throw ParameterError("mu must lie in [0,1], got " + std::to_string(mu));
  }
  if (convention == Convention::kExclusive && lambda + mu > 1.0 + 1e-15) {
    throw ParameterError("exclusive convention requires lambda + mu <= 1");
  }
}

void ModelParams::require_stable() const {
  validate();
  if (!(mu > lambda)) {
    throw ParameterError("infinite-horizon analysis requires mu > lambda");
  }
}

SlotLaw::SlotLaw(const ModelParams& params) {
  auto add = [this](int a, int d, double p) {
    if (p > 0.0) outcomes_[static_cast<std::size_t>(size_++)] = SlotOutcome{a, d, p};
  };
  const double lam = params.lambda;
  const double mu = params.mu;
  if (params.convention == Convention::kIndependent) {
    add(0, 0, (1.0 - lam) * (1.0 - mu));
    add(0, 1, (1.0 - lam) * mu);
    add(1, 0, lam * (1.0 - mu));
    add(1, 1, lam * mu);
  } else {
    add(0, 0, 1.0 - lam - mu);
    add(0, 1, mu);
    add(1, 0, lam);
  }
}

Lengths apply_routing(int xbar1, int xbar2, int u1, int u2) {
  if ((u1 != 0 && u1 != 1) || (u2 != 0 && u2 != 1)) {
    throw InfeasibleAction("routing indicators must be 0 or 1");
  }
  if (u1 == 1 && xbar1 == 0) throw InfeasibleAction("controller 1 routes from an empty queue");
  if (u2 == 1 && xbar2 == 0) throw InfeasibleAction("controller 2 routes from an empty queue");
  return Lengths{xbar1 - u1 + u2, xbar2 - u2 + u1};
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t domain, std::uint64_t replication,
                          Process process) {
  const std::uint64_t tag = (domain << 32) | static_cast<std::uint64_t>(process);
  return splitmix64(master ^ splitmix64(tag) ^ splitmix64(replication + 0x632BE59BD9B4E019ULL));
}

PrimitiveStreams::PrimitiveStreams(std::uint64_t master, std::uint64_t replication,
                                   std::uint64_t domain) {
  for (std::uint32_t p = 0; p < engines_.size(); ++p) {
    engines_[p].seed(derive_seed(master, domain, replication, static_cast<Process>(p)));
  }
}

Primitives sample_primitives(PrimitiveStreams& streams, const ModelParams& params) {
  Primitives w;
  if (params.convention == Convention::kIndependent) {
    w.a1 = bernoulli(streams.engine(Process::kArrival1), params.lambda);
    w.a2 = bernoulli(streams.engine(Process::kArrival2), params.lambda);
    w.d1 = bernoulli(streams.engine(Process::kDeparture1), params.mu);
    w.d2 = bernoulli(streams.engine(Process::kDeparture2), params.mu);
    return w;
  }
  auto draw = [&](std::mt19937_64& e, int& a, int& d) {
    const double u = uniform01(e);
    a = u < params.lambda ? 1 : 0;
    d = (a == 0 && u < params.lambda + params.mu) ? 1 : 0;
  };
  draw(streams.engine(Process::kArrival1), w.a1, w.d1);
  draw(streams.engine(Process::kArrival2), w.a2, w.d2);
  return w;
}

// ---------------------------------------------------------------------------

CostFunction CostFunction::zero() { return polynomial({}); }

CostFunction CostFunction::linear() {
  CostFunction c = polynomial({0.0, 1.0});
  c.name_ = "linear";
  return c;
}

CostFunction CostFunction::square() {
  CostFunction c = polynomial({0.0, 0.0, 1.0});
  c.name_ = "square";
  return c;
}

CostFunction CostFunction::polynomial(std::vector<double> coeffs) {
  for (double c : coeffs) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw ParameterError("cost polynomial coefficients must be finite and non-negative");
    }
  }
  while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
  CostFunction f;
  if (coeffs.empty()) {
    f.name_ = "zero";
    return f;
  }
  std::ostringstream os;
  os.precision(17);
  os << "poly:";
  for (std::size_t k = 0; k < coeffs.size(); ++k) os << (k ? "," : "") << coeffs[k];
  f.name_ = os.str();
  f.coeffs_ = std::move(coeffs);
  return f;
}

CostFunction CostFunction::parse(const std::string& spec) {
  if (spec == "zero") return zero();
  if (spec == "linear" || spec == "identity") return linear();
  if (spec == "square") return square();
  if (spec.rfind("poly:", 0) == 0) {
    std::vector<double> coeffs;
    std::stringstream ss(spec.substr(5));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        coeffs.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ParameterError("bad polynomial coefficient '" + item + "'");
      }
    }
    if (coeffs.empty()) throw ParameterError("poly: needs at least one coefficient");
    return polynomial(std::move(coeffs));
  }
  throw ParameterError("unknown cost '" + spec + "' (expected zero|linear|square|poly:<coeffs>)");
}

double CostFunction::operator()(std::int64_t x) const {
  double acc = 0.0;
  const double xd = static_cast<double>(x);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * xd + *it;
  return acc;
}

bool CostFunction::is_zero() const { return coeffs_.empty(); }

void CostFunction::validate(int range) const {
  for (int x = 0; x < range; ++x) {
    const double here = (*this)(x);
    const double next = (*this)(x + 1);
    if (next < here) throw ParameterError("cost " + name_ + " is not increasing at " + std::to_string(x));
    if (x >= 1) {
      const double prev = (*this)(x - 1);
      const double slack = 1e-12 * std::max({1.0, std::abs(next), std::abs(prev)});
      if (next + prev < 2.0 * here - slack) {
        throw ParameterError("cost " + name_ + " is not convex at " + std::to_string(x));
      }
    }
  }
}

CostModel::CostModel(std::vector<CostFunction> schedule) : schedule_(std::move(schedule)) {
  if (schedule_.empty()) throw ParameterError("cost schedule must not be empty");
}

CostModel CostModel::parse(const std::string& spec) {
  std::vector<CostFunction> schedule;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ';')) schedule.push_back(CostFunction::parse(item));
  if (schedule.empty()) throw ParameterError("empty cost specification");
  return CostModel(std::move(schedule));
}

const CostFunction& CostModel::at(int t) const {
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(std::max(t, 0)), schedule_.size() - 1);
  return schedule_[idx];
}

std::string CostModel::name() const {
  std::string out;
  for (std::size_t k = 0; k < schedule_.size(); ++k) out += (k ? ";" : "") + schedule_[k].name();
  return out;
}

void CostModel::validate(int range) const {
  for (const auto& f : schedule_) f.validate(range);
}

double stage_cost(int x1, int x2, const CostModel& cost, int t) {
  const CostFunction& c = cost.at(t);
  return c(x1) + c(x2);
}

}  // namespace sigroute
