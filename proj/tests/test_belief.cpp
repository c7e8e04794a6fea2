#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "sigroute/belief.hpp"
#include "sigroute/errors.hpp"
#include "sigroute/policies.hpp"

using namespace sigroute;

namespace {

oracle::Law to_law(const Pmf& p) {
  oracle::Law l;
  for (int x = p.min_support(); x <= p.max_support(); ++x) {
    if (p[x] > 0) l[x] = p[x];
  }
  return l;
}

void check_same(const Pmf& p, const oracle::Law& l, double tol = 1e-14) {
  const oracle::Law mine = to_law(p);
  REQUIRE(mine.size() == l.size());
  for (const auto& [x, q] : l) {
    REQUIRE(mine.count(x) == 1);
    CHECK(mine.at(x) == doctest::Approx(q).epsilon(tol));
  }
}

// Random belief with strictly positive mass on [lo, hi]; with `holes`, some
// interior points are zeroed.
Pmf random_belief(std::mt19937_64& rng, int lo, int hi, bool holes) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(static_cast<std::size_t>(hi - lo + 1));
  double s = 0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const bool interior = k > 0 && k + 1 < w.size();
    w[k] = holes && interior && u(rng) < 0.4 ? 0.0 : u(rng);
    s += w[k];
  }
  for (double& x : w) x /= s;
  return Pmf::from_window(lo, w);
}

}  // namespace

TEST_CASE("pmf construction and access") {
  const Pmf p = Pmf::from_dense({0, 0.25, 0, 0.75, 0});
  CHECK(p.min_support() == 1);
  CHECK(p.max_support() == 3);
  CHECK(p[2] == 0.0);
  CHECK(p[3] == 0.75);
  CHECK(p[100] == 0.0);
  CHECK(p.mean() == doctest::Approx(2.5));
  CHECK(p.dense().size() == 4);
  CHECK(p.quantile(0.0) == 1);
  CHECK(p.quantile(0.2499) == 1);
  CHECK(p.quantile(0.25) == 3);
  CHECK(p.quantile(0.9999) == 3);
  CHECK(Pmf::point(4).is_point());
  CHECK(Pmf() == Pmf::point(0));
  CHECK_THROWS_AS(Pmf::from_dense({0.5, 0.4}), InvalidPmf);
  CHECK_THROWS_AS(Pmf::from_dense({1.5, -0.5}), InvalidPmf);
  CHECK_THROWS_AS(Pmf::from_dense({}), InvalidPmf);
  CHECK_THROWS_AS(Pmf::from_window(-1, {1.0}), NegativeSupport);
  Pmf q = Pmf::point(1);
  CHECK_THROWS_AS(q.translate(-2), NegativeSupport);
}

TEST_CASE("propagation examples") {
  const ModelParams p{0.1, 0.5};
  check_same(propagate_arrivals_departures(Pmf::point(0), p), {{0, 0.9}, {1, 0.1}});
  check_same(propagate_arrivals_departures(Pmf::point(3), p), {{2, 0.45}, {3, 0.5}, {4, 0.05}});
  const ModelParams ex{0.1, 0.5, Convention::kExclusive};
  check_same(propagate_arrivals_departures(Pmf::point(3), ex), {{2, 0.5}, {3, 0.4}, {4, 0.1}});
}

TEST_CASE("propagation matches the reference on random beliefs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int lo = static_cast<int>(rng() % 5);
    const Pmf pi = random_belief(rng, lo, lo + static_cast<int>(rng() % 6), trial % 2 == 1);
    for (bool exclusive : {false, true}) {
      const ModelParams p{0.2, 0.5, exclusive ? Convention::kExclusive : Convention::kIndependent};
      const Pmf out = propagate_arrivals_departures(pi, p);
      check_same(out, oracle::propagate(to_law(pi), 0.2, 0.5, exclusive), 1e-12);
      CHECK(out.is_normalized());
    }
  }
}

TEST_CASE("conditioning and shifting") {
  const Pmf pibar = Pmf::from_window(2, {0.45, 0.5, 0.05});
  const Pmf routed = condition_on_action(pibar, 1, HalfInteger::from_int(3));
  check_same(routed, {{3, 10.0 / 11.0}, {4, 1.0 / 11.0}});
  check_same(condition_on_action(pibar, 0, HalfInteger::from_int(3)), {{2, 1.0}});
  check_same(shift_by_routing(routed, 1, 0), {{2, 10.0 / 11.0}, {3, 1.0 / 11.0}});
  check_same(shift_by_routing(routed, 0, 1), {{4, 10.0 / 11.0}, {5, 1.0 / 11.0}});
  check_same(shift_by_routing(routed, 1, 1), {{3, 10.0 / 11.0}, {4, 1.0 / 11.0}});
  CHECK_THROWS_AS(condition_on_action(pibar, 1, HalfInteger::from_int(5)), ZeroProbabilityEvent);
  CHECK_THROWS_AS(condition_on_action(Pmf::point(0), 1, HalfInteger::from_int(0)), ZeroProbabilityEvent);
  CHECK_THROWS_AS(shift_by_routing(Pmf::point(0), 1, 0), NegativeSupport);
}

TEST_CASE("support bounds and thresholds") {
  const ModelParams p{0.1, 0.5};
  const Pmf pibar1 = propagate_arrivals_departures(Pmf::point(3), p);
  const Pmf pibar2 = propagate_arrivals_departures(Pmf::from_dense({0, 0.9, 0, 0, 0, 0.1}), p);
  const SupportBounds b = support_bounds(pibar1, pibar2);
  CHECK(b == SupportBounds{2, 4, 0, 6, 0, 6});
  CHECK(threshold(b) == HalfInteger::from_int(3));
  CHECK(threshold(SupportBounds{0, 0, 3, 4, 3, 4}) == HalfInteger::from_twice(7));
  CHECK(threshold(SupportBounds{}) == HalfInteger::from_int(0));
  CHECK(HalfInteger::from_twice(7).to_string() == "3.5");
  CHECK(HalfInteger::from_twice(7).ceil() == 4);
  CHECK(HalfInteger::from_twice(-1).ceil() == 0);
  CHECK(HalfInteger::from_twice(-1).floor() == -1);
  CHECK(3 >= HalfInteger::from_int(3));
  CHECK(3 < HalfInteger::from_twice(7));
}

TEST_CASE("bound recursion examples on interval beliefs") {
  // Uniform pre-decision beliefs on {0..6}: threshold 3.
  std::vector<double> u(7, 1.0 / 7.0);
  const Pmf b = Pmf::from_dense(u);
  const SupportBounds sb = support_bounds(b, b);
  const HalfInteger th = threshold(sb);
  CHECK(update_bounds_lemma1(sb, 0, 0, th) == JointBounds{0, 2});
  CHECK(update_bounds_lemma1(sb, 1, 1, th) == JointBounds{3, 6});
  CHECK(update_bounds_lemma1(sb, 1, 0, th) == JointBounds{1, 5});
  CHECK(update_bounds_lemma1(sb, 0, 1, th) == JointBounds{1, 5});
  CHECK(barred_from_prior({3, 5}) == JointBounds{2, 6});
  CHECK(barred_from_prior({0, 0}) == JointBounds{0, 1});
}

TEST_CASE("bound recursion equals filter bounds for interval supports around the threshold") {
  std::mt19937_64 rng(5);
  const Policy ghat = Policy::ghat();
  int checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const int lo1 = static_cast<int>(rng() % 4), lo2 = static_cast<int>(rng() % 4);
    const Pmf b1 = random_belief(rng, lo1, lo1 + static_cast<int>(rng() % 7), false);
    const Pmf b2 = random_belief(rng, lo2, lo2 + static_cast<int>(rng() % 7), false);
    const CommonInfo info = CommonInfo::from_beliefs(b1, b2);
    // Both supports must hold a holding value and a routing value.
    const int up = static_cast<int>(std::max<std::int64_t>(info.threshold.ceil(), 1));
    if (b1.min_support() > up - 1 || b2.min_support() > up - 1 || b1.max_support() < up || b2.max_support() < up) {
      continue;
    }
    for (int u1 = 0; u1 <= 1; ++u1) {
      for (int u2 = 0; u2 <= 1; ++u2) {
        const auto [post1, post2] = posterior_after_routing(info, u1, u2, ghat);
        CHECK(update_bounds_lemma1(info.bounds, u1, u2, info.threshold) == support_bounds(post1, post2).joint());
        ++checked;
      }
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("a support on one side of the threshold makes the recursion loose") {
  // Queue 1 can only route, so after (route, hold) nothing lands at th - 1.
  const CommonInfo info = CommonInfo::from_beliefs(Pmf::point(2), Pmf::from_dense({0.5, 0.5}));
  REQUIRE(info.threshold == HalfInteger::from_int(1));
  const auto [post1, post2] = posterior_after_routing(info, 1, 0, Policy::ghat());
  CHECK(support_bounds(post1, post2).joint() == JointBounds{1, 1});
  CHECK(update_bounds_lemma1(info.bounds, 1, 0, info.threshold) == JointBounds{0, 1});
}

TEST_CASE("bound recursion contains filter bounds when supports have gaps") {
  std::mt19937_64 rng(6);
  const Policy ghat = Policy::ghat();
  for (int trial = 0; trial < 400; ++trial) {
    const Pmf b1 = random_belief(rng, 0, 2 + static_cast<int>(rng() % 7), true);
    const Pmf b2 = random_belief(rng, 1, 3 + static_cast<int>(rng() % 7), true);
    const CommonInfo info = CommonInfo::from_beliefs(b1, b2);
    for (int u1 = 0; u1 <= 1; ++u1) {
      for (int u2 = 0; u2 <= 1; ++u2) {
        std::pair<Pmf, Pmf> post;
        try {
          post = posterior_after_routing(info, u1, u2, ghat);
        } catch (const ZeroProbabilityEvent&) {
          continue;
        }
        const JointBounds filt = support_bounds(post.first, post.second).joint();
        const JointBounds rec = update_bounds_lemma1(info.bounds, u1, u2, info.threshold);
        CHECK(rec.lb <= filt.lb);
        CHECK(filt.ub <= rec.ub);
      }
    }
  }
}

TEST_CASE("a support hole makes the recursion loose") {
  // First slot of the two-point start: queue 2 has nothing at 3, so after
  // (hold, route) its posterior starts at 4 - 1 = 3, not at 3 - 1.
  const ModelParams p{0.1, 0.5};
  const CommonInfo info = common_info_from_prior(Pmf::point(3), Pmf::from_dense({0, 0.9, 0, 0, 0, 0.1}), p);
  CHECK(info.pibar2[3] == 0.0);
  const auto [post1, post2] = posterior_after_routing(info, 0, 1, Policy::ghat());
  check_same(post1, {{3, 1.0}});
  CHECK(post2.min_support() == 3);
  CHECK(post2.max_support() == 5);
  const JointBounds rec = update_bounds_lemma1(info.bounds, 0, 1, info.threshold);
  CHECK(rec == JointBounds{2, 5});
  CHECK(support_bounds(post1, post2).joint() == JointBounds{3, 5});
}

TEST_CASE("equal bounds widen to a gap of one after both route") {
  const ModelParams p{0.1, 0.5};
  for (int k = 1; k < 6; ++k) {
    const CommonInfo info = common_info_from_prior(Pmf::point(k), Pmf::point(k), p);
    CHECK(info.threshold == HalfInteger::from_int(k));
    const auto [a, b] = posterior_after_routing(info, 1, 1, Policy::ghat());
    const JointBounds j = support_bounds(a, b).joint();
    CHECK(j == JointBounds{k, k + 1});
    CHECK(update_bounds_lemma1(info.bounds, 1, 1, info.threshold) == j);
  }
}

TEST_CASE("support propagation matches full propagation") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int lo = static_cast<int>(rng() % 4);
    const Pmf pi = random_belief(rng, lo, lo + static_cast<int>(rng() % 5), false);
    for (const ModelParams& p : {ModelParams{0.1, 0.5}, ModelParams{0.0, 0.5}, ModelParams{0.3, 1.0},
                                 ModelParams{0.2, 0.5, Convention::kExclusive}}) {
      const Pmf out = propagate_arrivals_departures(pi, p);
      CHECK(propagate_support({pi.min_support(), pi.max_support()}, p) ==
            JointBounds{out.min_support(), out.max_support()});
    }
  }
}
