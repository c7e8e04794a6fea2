#include <doctest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "sigroute/errors.hpp"
#include "sigroute/model.hpp"

using namespace sigroute;

TEST_CASE("queue step examples") {
  CHECK(step_queue(0, 1, 0) == 0);
  CHECK(step_queue(0, 1, 1) == 1);
  CHECK(step_queue(3, 1, 0) == 2);
  CHECK(step_queue(3, 0, 1) == 4);
  CHECK(step_queue(3, 1, 1) == 3);
  CHECK(step_queue(0, 0, 0) == 0);
}

TEST_CASE("queue step is monotone in the length") {
  for (int x = 0; x < 50; ++x) {
    for (int d = 0; d <= 1; ++d) {
      for (int a = 0; a <= 1; ++a) {
        CHECK(step_queue(x, d, a) <= step_queue(x + 1, d, a));
        CHECK(step_queue(x, d, a) >= 0);
        CHECK(step_queue(x, d, a) == oracle::step(x, d, a));
      }
    }
  }
}

TEST_CASE("routing moves one customer and conserves the total") {
  CHECK(apply_routing(4, 1, 1, 0) == Lengths{3, 2});
  CHECK(apply_routing(4, 1, 0, 1) == Lengths{5, 0});
  CHECK(apply_routing(4, 1, 1, 1) == Lengths{4, 1});
  CHECK(apply_routing(0, 0, 0, 0) == Lengths{0, 0});
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) {
      for (int u1 = 0; u1 <= (a > 0); ++u1) {
        for (int u2 = 0; u2 <= (b > 0); ++u2) {
          const Lengths l = apply_routing(a, b, u1, u2);
          CHECK(l.sum() == a + b);
          CHECK(l.x1 >= 0);
          CHECK(l.x2 >= 0);
        }
      }
    }
  }
}

TEST_CASE("routing out of an empty queue is rejected") {
  CHECK_THROWS_AS(apply_routing(0, 3, 1, 0), InfeasibleAction);
  CHECK_THROWS_AS(apply_routing(3, 0, 0, 1), InfeasibleAction);
  CHECK_THROWS_AS(apply_routing(3, 3, 2, 0), InfeasibleAction);
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW((ModelParams{0.1, 0.5}.validate()));
  CHECK_NOTHROW((ModelParams{0.0, 1.0}.validate()));
  CHECK_THROWS_AS((ModelParams{-0.1, 0.5}.validate()), ParameterError);
  CHECK_THROWS_AS((ModelParams{0.1, 1.5}.validate()), ParameterError);
  CHECK_THROWS_AS((ModelParams{std::nan(""), 0.5}.validate()), ParameterError);
  CHECK_THROWS_AS((ModelParams{0.6, 0.5, Convention::kExclusive}.validate()), ParameterError);
  CHECK_NOTHROW((ModelParams{0.5, 0.5, Convention::kExclusive}.validate()));
  CHECK_THROWS_AS((ModelParams{0.5, 0.5}.require_stable()), ParameterError);
  CHECK_THROWS_AS((ModelParams{0.6, 0.5}.require_stable()), ParameterError);
  CHECK_NOTHROW((ModelParams{0.1, 0.5}.require_stable()));
  CHECK(convention_from_string("exclusive") == Convention::kExclusive);
  CHECK_THROWS_AS(convention_from_string("both"), ParameterError);
}

TEST_CASE("slot law matches the reference outcomes") {
  for (bool exclusive : {false, true}) {
    const ModelParams p{0.1, 0.5, exclusive ? Convention::kExclusive : Convention::kIndependent};
    std::map<std::pair<int, int>, double> mine;
    double total = 0;
    for (const SlotOutcome& o : SlotLaw(p)) {
      mine[{o.arrival, o.departure}] += o.prob;
      total += o.prob;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
    for (const oracle::Outcome& o : oracle::slot(0.1, 0.5, exclusive)) {
      CHECK(mine[{o.a, o.d}] == doctest::Approx(o.p).epsilon(1e-15));
    }
  }
  // Zero-probability outcomes are dropped.
  CHECK(SlotLaw(ModelParams{0.0, 1.0}).size() == 1);
}

TEST_CASE("bernoulli draws have the right frequency") {
  std::mt19937_64 e(derive_seed(42, 0, 0, Process::kArrival1));
  long long hits = 0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) hits += bernoulli(e, 0.5);
  CHECK(std::abs(static_cast<double>(hits) / n - 0.5) < 0.002);
}

TEST_CASE("independent primitives have the right marginals") {
  PrimitiveStreams s(3, 0);
  const ModelParams p{0.3, 0.5};
  const int n = 400'000;
  double a1 = 0, a2 = 0, d1 = 0, d2 = 0, both = 0;
  for (int i = 0; i < n; ++i) {
    const Primitives w = sample_primitives(s, p);
    a1 += w.a1;
    a2 += w.a2;
    d1 += w.d1;
    d2 += w.d2;
    both += w.a1 * w.d1;
  }
  CHECK(std::abs(a1 / n - 0.3) < 0.004);
  CHECK(std::abs(a2 / n - 0.3) < 0.004);
  CHECK(std::abs(d1 / n - 0.5) < 0.004);
  CHECK(std::abs(d2 / n - 0.5) < 0.004);
  CHECK(std::abs(both / n - 0.15) < 0.004);
}

TEST_CASE("exclusive primitives never combine an arrival with a departure") {
  PrimitiveStreams s(5, 1);
  const ModelParams p{0.1, 0.5, Convention::kExclusive};
  const int n = 400'000;
  double a = 0, d = 0;
  for (int i = 0; i < n; ++i) {
    const Primitives w = sample_primitives(s, p);
    REQUIRE(w.a1 * w.d1 == 0);
    REQUIRE(w.a2 * w.d2 == 0);
    a += w.a1;
    d += w.d2;
  }
  CHECK(std::abs(a / n - 0.1) < 0.003);
  CHECK(std::abs(d / n - 0.5) < 0.004);
}

TEST_CASE("streams are reproducible and separated") {
  PrimitiveStreams a(9, 17), b(9, 17), c(9, 18), d(9, 17, 1);
  const ModelParams p{0.5, 0.5};
  int same_c = 0, same_d = 0;
  for (int i = 0; i < 200; ++i) {
    const Primitives wa = sample_primitives(a, p);
    CHECK(wa == sample_primitives(b, p));
    same_c += wa == sample_primitives(c, p);
    same_d += wa == sample_primitives(d, p);
  }
  CHECK(same_c < 60);
  CHECK(same_d < 60);
  CHECK(derive_seed(1, 0, 0, Process::kArrival1) != derive_seed(1, 0, 0, Process::kArrival2));
}

TEST_CASE("cost functions") {
  CHECK(CostFunction::linear()(7) == 7.0);
  CHECK(CostFunction::square()(7) == 49.0);
  CHECK(CostFunction::zero()(7) == 0.0);
  CHECK(CostFunction::parse("poly:1,0,2")(3) == 19.0);
  CHECK(CostFunction::parse("identity").name() == "linear");
  CHECK(CostFunction::parse("poly:0,1").name() == "poly:0,1");
  CHECK(CostFunction::parse("poly:0,0").is_zero());
  CHECK_THROWS_AS(CostFunction::parse("cubic"), ParameterError);
  CHECK_THROWS_AS(CostFunction::parse("poly:1,x"), ParameterError);
  CHECK_THROWS_AS(CostFunction::parse("poly:-1"), ParameterError);
  CHECK_NOTHROW(CostFunction::square().validate(1000));

  const CostModel m = CostModel::parse("zero;square");
  CHECK(m.name() == "zero;square");
  CHECK_FALSE(m.stationary());
  CHECK(stage_cost(2, 3, m, 0) == 0.0);
  CHECK(stage_cost(2, 3, m, 1) == 13.0);
  CHECK(stage_cost(2, 3, m, 50) == 13.0);
  CHECK_THROWS_AS(CostModel::parse(""), ParameterError);
  CHECK_THROWS_AS(CostModel(std::vector<CostFunction>{}), ParameterError);
}
