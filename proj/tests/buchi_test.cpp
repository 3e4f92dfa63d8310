#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bgc/buchi.hpp"
#include "test_util.hpp"

using namespace bgc;
using test::Q;

TEST_CASE("B = V is won by the Buchi player everywhere; empty B never") {
  auto input = test::load_fixture("fig1a.json");
  std::vector<int> all;
  for (int v = 0; v < input.arena.size(); ++v) all.push_back(v);
  auto f = buchi_threshold<Rational>(input.arena, input.mechanism, all, 1);
  for (int v = 0; v < input.arena.size(); ++v) CHECK(f.values[v] == Q(0));
  auto none = buchi_threshold<Rational>(input.arena, input.mechanism, {}, 1);
  for (int v = 0; v < input.arena.size(); ++v) CHECK(none.values[v] == Q(1));
  auto none2 = buchi_threshold<Rational>(input.arena, input.mechanism, {}, 2);
  for (int v = 0; v < input.arena.size(); ++v) CHECK(none2.values[v] == Q(0));
}

TEST_CASE("Buchi on an absorbing set equals the reachability thresholds") {
  auto input = test::load_fixture("fig1a.json");
  const int d = input.arena.index("d");
  auto reach = limit_threshold<Rational>(input.arena, input.mechanism, Objective::reach({d}), 1);
  auto buchi = buchi_threshold<Rational>(input.arena, input.mechanism, {d}, 1);
  for (int v = 0; v < input.arena.size(); ++v) CHECK(buchi.values[v] == reach.values[v]);
}

TEST_CASE("strongly-connected variant keeps thresholds above zero") {
  // The outer fixed point of this game never stabilizes exactly (the
  // B-values converge only in the limit), so it is solved approximately.
  auto input = test::load_fixture("fig1c_scc.json");
  const int b = input.arena.index("b");
  const int t = input.arena.index("t");
  CHECK_THROWS_AS(buchi_threshold<Rational>(input.arena, input.mechanism, {t}, 1),
                  DenominatorOverflow);
  auto f = buchi_threshold<double>(input.arena, input.mechanism, {t}, 1);
  CHECK(f.values[b] > 1e-3);
}

TEST_CASE("bounded Buchi levels are monotone in the visit count") {
  auto input = test::load_fixture("fig1c_scc.json");
  const int t = input.arena.index("t");
  std::vector<Rational> prev;
  for (long k = 1; k <= 5; ++k) {
    auto g = bounded_buchi_threshold<Rational>(input.arena, input.mechanism, {t}, k, 1);
    if (!prev.empty())
      for (int v = 0; v < input.arena.size(); ++v) CHECK(g.values[v] >= prev[v]);
    prev = g.values;
  }
  CHECK_THROWS_AS(
      bounded_buchi_threshold<Rational>(input.arena, input.mechanism, {}, 1, 1),
      std::invalid_argument);
}

TEST_CASE("co-Buchi thresholds complement the dual Buchi game") {
  auto input = test::load_fixture("fig1c_scc.json");
  const int t = input.arena.index("t");
  std::vector<int> not_t;
  for (int v = 0; v < input.arena.size(); ++v)
    if (v != t) not_t.push_back(v);

  // The co-Buchi protagonist is player 2 (player 1 always owns the Buchi
  // side); their vector must complement Th1^Buchi({t}) pointwise. This
  // arena only stabilizes in the limit, so the solves are approximate.
  auto cobuchi = cobuchi_threshold<double>(input.arena, input.mechanism, not_t, 2);
  auto buchi = buchi_threshold<double>(input.arena, input.mechanism, {t}, 1);
  auto buchi2 = buchi_threshold<double>(input.arena, input.mechanism, {t}, 2);
  for (int v = 0; v < input.arena.size(); ++v) {
    CHECK(std::abs(buchi.values[v] + buchi2.values[v] - 1.0) < 1e-6);
    CHECK(std::abs(cobuchi.values[v] + buchi.values[v] - 1.0) < 1e-6);
  }

  // Staying everywhere is trivially won by the co-Buchi protagonist.
  std::vector<int> all;
  for (int v = 0; v < input.arena.size(); ++v) all.push_back(v);
  auto trivial = cobuchi_threshold<Rational>(input.arena, input.mechanism, all, 2);
  for (int v = 0; v < input.arena.size(); ++v) CHECK(trivial.values[v] == Q(0));
}

TEST_CASE("random arenas: Buchi complementarity and level consistency") {
  std::mt19937_64 rng(5150);
  int solved = 0;
  for (int trial = 0; trial < 30; ++trial) {
    auto arena = test::random_arena(rng, 6, 3);
    auto mech = rng() % 2 == 0 ? Mechanism::richman() : Mechanism::poorman();
    auto b_set = test::random_subset(rng, arena.size());
    SolveOptions<Rational> opt;
    opt.max_iterations = 20000;
    opt.max_k = 200;
    try {
      auto g1 = buchi_threshold<Rational>(arena, mech, b_set, 1, opt);
      auto g2 = buchi_threshold<Rational>(arena, mech, b_set, 2, opt);
      ++solved;
      for (int v = 0; v < arena.size(); ++v) {
        CHECK(g1.values[v] + g2.values[v] == Q(1));
        CHECK(g1.values[v] >= Q(0));
        CHECK(g1.values[v] <= Q(1));
      }
    } catch (const NotConverged&) {
    } catch (const DenominatorOverflow&) {
    }
  }
  CHECK(solved >= 15);
}
