#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qtazrp/qcore.hpp"
#include "qtazrp/rng.hpp"
#include "support.hpp"

using namespace qtazrp;

TEST_CASE("QParams requires q strictly inside (0,1)") {
  CHECK_NOTHROW(QParams(0.5));
  CHECK_THROWS_AS(QParams(0.0), std::invalid_argument);
  CHECK_THROWS_AS(QParams(1.0), std::invalid_argument);
  CHECK_THROWS_AS(QParams(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(QParams(1.3), std::invalid_argument);
}

TEST_CASE("q_factorial basic values") {
  const QParams q(0.5);
  CHECK(q_factorial(0, q) == 1.0);
  CHECK(q_factorial(2, q) == doctest::Approx(1.5).epsilon(1e-14));
  // Independent route: [3]_q! = (1+q)(1+q+q^2).
  const double direct = (1.0 + 0.5) * (1.0 + 0.5 + 0.25);
  CHECK(direct == doctest::Approx(2.625));
  CHECK(q_factorial(3, q) == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("q_factorial ratio property") {
  SplitMix64 rng(101);
  for (int rep = 0; rep < 50; ++rep) {
    const QParams q(rng.uniform(0.05, 0.95));
    const int k = static_cast<int>(rng.uniform_int(1, 9));
    const double ratio = q_factorial(k, q) / q_factorial(k - 1, q);
    const double expected = (1.0 - std::pow(q.q(), k)) / (1.0 - q.q());
    CHECK(ratio == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("StateVector ordering") {
  CHECK_NOTHROW(StateVector({3, 1, 0}));
  CHECK_THROWS_AS(StateVector({0, 1}), StateOrderError);
  const StateVector relaxed = StateVector::relaxed({0, 1});
  CHECK(!relaxed.ordered());
  CHECK(relaxed.n() == 2);
  const StateVector x({5, 2});
  CHECK(x.lowered(2).coords() == std::vector<int>{5, 1});
}

TEST_CASE("stacks on hand-checked states") {
  const auto d1 = stacks(StateVector({4, 4, 2, 0}));
  CHECK(d1.entries == std::vector<Stack>{{4, 2}, {2, 1}, {0, 1}});
  CHECK(d1.cumulative == std::vector<int>{2, 3, 4});

  const auto d2 = stacks(StateVector({0, 0, 0}));
  CHECK(d2.entries == std::vector<Stack>{{0, 3}});
  CHECK(d2.cumulative == std::vector<int>{3});

  const auto d3 = stacks(StateVector({7, 3, 3, 3, 1, 1}));
  CHECK(d3.entries == std::vector<Stack>{{7, 1}, {3, 3}, {1, 2}});
  CHECK(d3.cumulative == std::vector<int>{1, 4, 6});

  CHECK_THROWS_AS(stacks(StateVector::relaxed({0, 1})), StateOrderError);
}

TEST_CASE("stacks round-trips with reconstruct") {
  SplitMix64 rng(202);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = static_cast<int>(rng.uniform_int(1, 7));
    const StateVector X = testsupport::random_ordered_state(n, -4, 4, rng);
    const auto d = stacks(X);
    CHECK(d.reconstruct() == X);
    int total = 0;
    for (const auto& e : d.entries) total += e.height;
    CHECK(total == n);
    for (std::size_t i = 1; i < d.entries.size(); ++i)
      CHECK(d.entries[i - 1].site > d.entries[i].site);
  }
}

TEST_CASE("reconstruct round-trips from random decompositions") {
  SplitMix64 rng(205);
  for (int rep = 0; rep < 100; ++rep) {
    StackDecomposition d;
    const int parts = static_cast<int>(rng.uniform_int(1, 4));
    int site = static_cast<int>(rng.uniform_int(2, 6));
    int cum = 0;
    for (int i = 0; i < parts; ++i) {
      const int height = static_cast<int>(rng.uniform_int(1, 3));
      d.entries.push_back({site, height});
      cum += height;
      d.cumulative.push_back(cum);
      site -= static_cast<int>(rng.uniform_int(1, 3));
    }
    const auto back = stacks(d.reconstruct());
    CHECK(back.entries == d.entries);
    CHECK(back.cumulative == d.cumulative);
  }
}

TEST_CASE("weight_W values and lower bound") {
  const QParams q(0.5);
  CHECK(weight_W(StateVector({3, 1, 0}), q) == 1.0);
  CHECK(weight_W(StateVector({2, 2}), q) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(weight_W(StateVector({5, 5, 5}), q) == doctest::Approx(q_factorial(3, q)).epsilon(1e-14));
  CHECK_THROWS_AS(weight_W(StateVector::relaxed({1, 2}), q), StateOrderError);

  SplitMix64 rng(303);
  for (int rep = 0; rep < 100; ++rep) {
    const QParams qq(rng.uniform(0.05, 0.95));
    const int n = static_cast<int>(rng.uniform_int(1, 6));
    const StateVector X = testsupport::random_ordered_state(n, -3, 3, rng);
    const double w = weight_W(X, qq);
    CHECK(w >= 1.0 - 1e-12);
    const bool all_distinct = stacks(X).entries.size() == static_cast<std::size_t>(n);
    if (all_distinct)
      CHECK(w == doctest::Approx(1.0));
    else
      CHECK(w > 1.0);
  }
}

TEST_CASE("prod_prime branches") {
  auto f = [](int k) { return cplx(k + 5, 0.0); };
  CHECK(prod_prime(f, 0, -1) == cplx(1.0, 0.0));
  // prod'_{k=0}^{-3} f = 1/(f(-1) f(-2)) = 1/(4*3)
  CHECK(prod_prime(f, 0, -3).real() == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  auto id = [](int k) { return cplx(k, 0.0); };
  CHECK(prod_prime(id, 1, 2).real() == doctest::Approx(2.0));
}

TEST_CASE("prod_prime pole in reciprocal branch") {
  auto z = [](int k) { return cplx(k, 0.0); };  // zero at k = 0
  CHECK_THROWS_AS(prod_prime(z, 2, -2), PoleError);  // reciprocal over k in {-1,0,1}
}

TEST_CASE("prod_prime splicing identity over all small bounds") {
  SplitMix64 rng(404);
  std::map<int, cplx> table;
  for (int k = -7; k <= 7; ++k)
    table[k] = cplx(rng.uniform(0.2, 2.0), rng.uniform(-1.0, 1.0));
  auto f = [&](int k) { return table.at(k); };
  for (int y = -5; y <= 5; ++y)
    for (int m = -5; m <= 5; ++m)
      for (int x = -5; x <= 5; ++x) {
        const cplx lhs = prod_prime(f, m + 1, x) * prod_prime(f, y, m);
        const cplx rhs = prod_prime(f, y, x);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
      }
}

TEST_CASE("rate_b") {
  CHECK(rate_b(RateProfile(1.0, QParams(0.5)), 0) == doctest::Approx(0.5));
  CHECK(rate_b(RateProfile(2.0, QParams(0.25)), 7) == doctest::Approx(1.5));
  RateProfile withOverride(1.0, QParams(0.5), {{3, 0.4}});
  CHECK(rate_b(withOverride, 3) == doctest::Approx(0.2));
  CHECK(rate_b(withOverride, 4) == doctest::Approx(0.5));
}

TEST_CASE("RateProfile JSON parsing") {
  const auto p = RateProfile::from_json_text(
      R"({"q": 0.5, "default_a": 1.0, "overrides": {"-2": 2.0, "3": 0.5}})");
  CHECK(p.q() == doctest::Approx(0.5));
  CHECK(p.a(-2) == doctest::Approx(2.0));
  CHECK(p.a(3) == doctest::Approx(0.5));
  CHECK(p.a(100) == doctest::Approx(1.0));  // totality
  CHECK(p.max_a() == doctest::Approx(2.0));

  // Round trip.
  const auto p2 = RateProfile::from_json_text(p.to_json_text());
  CHECK(p2.a(-2) == doctest::Approx(2.0));
  CHECK(p2.q() == doctest::Approx(0.5));

  CHECK_THROWS_AS(RateProfile::from_json_text("not json"), std::invalid_argument);
  CHECK_THROWS_AS(RateProfile::from_json_text(R"({"q": 1.5, "default_a": 1.0})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(RateProfile::from_json_text(R"({"q": 0.5})"), std::invalid_argument);
  CHECK_THROWS_AS(
      RateProfile::from_json_text(R"({"q": 0.5, "default_a": 1.0, "overrides": {"x": 2.0}})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      RateProfile::from_json_text(R"({"q": 0.5, "default_a": 1.0, "overrides": {"1": -2.0}})"),
      std::invalid_argument);
}

TEST_CASE("max_b_in window scan") {
  RateProfile p(1.0, QParams(0.5), {{2, 4.0}});
  CHECK(p.max_b_in(-1, 1) == doctest::Approx(0.5));
  CHECK(p.max_b_in(-1, 2) == doctest::Approx(2.0));
  // All-sites-overridden window ignores the default.
  RateProfile p2(10.0, QParams(0.5), {{0, 1.0}, {1, 1.0}});
  CHECK(p2.max_b_in(0, 1) == doctest::Approx(0.5));
}
