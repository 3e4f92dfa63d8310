#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "bgc/fixpoint.hpp"
#include "test_util.hpp"

using namespace bgc;
using test::Q;

TEST_CASE("reach thresholds on the five-vertex example are exact") {
  auto input = test::load_fixture("fig1a.json");
  auto f = limit_threshold<Rational>(input.arena, input.mechanism, *input.objective, 1);
  CHECK(f.values[input.arena.index("a")] == Q(0));
  CHECK(f.values[input.arena.index("b")] == Q(1, 4));
  CHECK(f.values[input.arena.index("c")] == Q(1, 2));
  CHECK(f.values[input.arena.index("d")] == Q(0));
  CHECK(f.values[input.arena.index("e")] == Q(1));
}

TEST_CASE("finite-horizon table matches the golden CSV bit for bit") {
  auto input = test::load_fixture("fig1a.json");
  auto rows = bounded_table<Rational>(input.arena, input.mechanism, *input.objective, 1, 6);

  std::ifstream golden(test::fixture("fig5_golden.csv"));
  REQUIRE(golden.good());
  std::string line;
  std::getline(golden, line);  // header
  for (long t = 0; t <= 6; ++t) {
    REQUIRE(std::getline(golden, line));
    std::stringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');
    CHECK(std::stol(cell) == t);
    for (int v = 0; v < input.arena.size(); ++v) {
      REQUIRE(std::getline(cells, cell, ','));
      CHECK(rows[t].values[v] == parse_rational(cell));
    }
  }
}

TEST_CASE("one-shot safety example: thresholds and complementarity") {
  auto input = test::load_fixture("fig1c.json");
  auto f1 = limit_threshold<Rational>(input.arena, input.mechanism, *input.objective, 1);
  CHECK(f1.values[input.arena.index("a")] == Q(1));
  CHECK(f1.values[input.arena.index("b")] == Q(3, 8));
  CHECK(f1.values[input.arena.index("t")] == Q(0));
  auto f2 = limit_threshold<Rational>(input.arena, input.mechanism, *input.objective, 2);
  for (int v = 0; v < input.arena.size(); ++v) CHECK(f1.values[v] + f2.values[v] == Q(1));
}

TEST_CASE("poorman example stabilizes exactly") {
  auto input = test::load_fixture("fig3.json");
  auto f = limit_threshold<Rational>(input.arena, input.mechanism, *input.objective, 1);
  CHECK(f.values[input.arena.index("v1")] == Q(4, 7));
  CHECK(f.values[input.arena.index("v2")] == Q(1, 4));
  CHECK(f.values[input.arena.index("t2")] == Q(1));
  auto fd = limit_threshold<double>(input.arena, input.mechanism, *input.objective, 1);
  CHECK(std::abs(fd.values[input.arena.index("v1")] - 4.0 / 7.0) < 1e-9);
  CHECK(std::abs(fd.values[input.arena.index("v2")] - 0.25) < 1e-9);
}

TEST_CASE("greatest fixed point is selected even when fixed points are not unique") {
  auto input = test::load_fixture("fig4.json");
  auto f = limit_threshold<Rational>(input.arena, input.mechanism, *input.objective, 1);
  CHECK(f.values[input.arena.index("a")] == Q(1, 4));
  CHECK(f.values[input.arena.index("b")] == Q(1, 2));
  CHECK(f.values[input.arena.index("c")] == Q(0));
  CHECK(f.values[input.arena.index("d")] == Q(1));

  // The all-zero vector is also a fixed point of the operator and must
  // not be returned by the greatest-fixed-point iteration.
  ThresholdVector<Rational> zero;
  zero.player = 1;
  zero.values.assign(input.arena.size(), Q(0));
  zero.boundary.assign(input.arena.size(), 0);
  zero.boundary[input.arena.index("c")] = 1;
  auto once = apply_operator(zero, input.arena, input.mechanism, 1);
  CHECK(once.values == zero.values);
  CHECK(f.values != zero.values);

  auto cert = certify_fixed_point(f, input.arena, input.mechanism, *input.objective);
  CHECK(cert.max_residual == Q(0));
  CHECK(cert.complementarity_gap == Q(0));
}

TEST_CASE("zero-charge DAG thresholds match backward-induction averages") {
  // Without charges and with tau = 0 the operator reduces to the mean of
  // the best and worst successor; on a DAG a single backward pass is an
  // independent oracle.
  RawArena raw;
  raw.vertices.push_back({"s", {"m1", "m2"}, Q(0), Q(0)});
  raw.vertices.push_back({"m1", {"t", "z"}, Q(0), Q(0)});
  raw.vertices.push_back({"m2", {"t", "m1"}, Q(0), Q(0)});
  raw.vertices.push_back({"t", {"t"}, Q(0), Q(0)});
  raw.vertices.push_back({"z", {"z"}, Q(0), Q(0)});
  auto arena = build_arena(raw);
  auto f = limit_threshold<Rational>(arena, Mechanism::richman(), Objective::reach({3}), 1);
  // Backward: t = 0, z = 1, m1 = (0+1)/2, m2 = (0 + 1/2)/2, s = (1/4 + 1/2)/2.
  CHECK(f.values[3] == Q(0));
  CHECK(f.values[4] == Q(1));
  CHECK(f.values[1] == Q(1, 2));
  CHECK(f.values[2] == Q(1, 4));
  CHECK(f.values[0] == Q(3, 8));
}

TEST_CASE("frugal boundaries shift target values for both players") {
  auto input = test::load_fixture("fig1a.json");
  auto objective = Objective::frugal_reach({3}, {{3, Q(1, 4)}});
  auto f1 = limit_threshold<Rational>(input.arena, input.mechanism, objective, 1);
  CHECK(f1.values[3] == Q(1, 4));
  auto f2 = limit_threshold<Rational>(input.arena, input.mechanism, objective, 2);
  CHECK(f2.values[3] == Q(3, 4));
  for (int v = 0; v < input.arena.size(); ++v) CHECK(f1.values[v] + f2.values[v] == Q(1));
}

TEST_CASE("properties on random arenas: complementarity, monotonicity, residual") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    auto arena = test::random_arena(rng);
    auto mech = test::random_mechanism(rng);
    auto targets = test::random_subset(rng, arena.size());
    auto objective = Objective::reach(targets);

    auto t1 = bounded_table<Rational>(arena, mech, objective, 1, 6);
    auto t2 = bounded_table<Rational>(arena, mech, objective, 2, 6);
    for (long t = 0; t <= 6; ++t)
      for (int v = 0; v < arena.size(); ++v) {
        CHECK(t1[t].values[v] + t2[t].values[v] == Q(1));
        if (t > 0) {
          CHECK(t1[t].values[v] <= t1[t - 1].values[v]);
          CHECK(t2[t].values[v] >= t2[t - 1].values[v]);
        }
      }

    SolveOptions<double> opt;
    try {
      auto limit = limit_threshold<double>(arena, mech, objective, 1, opt);
      auto next = apply_operator(limit, arena, mech, 1);
      for (int v = 0; v < arena.size(); ++v)
        CHECK(std::abs(next.values[v] - limit.values[v]) < 1e-8);
    } catch (const NotConverged&) {
      // Slow contraction is possible; convergence ratios are covered by
      // the larger acceptance-suite sample.
    }
  }
}

TEST_CASE("operator monotonicity: pointwise-larger inputs give larger outputs") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    auto arena = test::random_arena(rng);
    auto mech = test::random_mechanism(rng);
    std::vector<Rational> lo(arena.size()), hi(arena.size());
    for (int v = 0; v < arena.size(); ++v) {
      lo[v] = Q(static_cast<long>(rng() % 11), 10);
      hi[v] = lo[v] + Q(static_cast<long>(rng() % 5), 10);
      if (hi[v] > 1) hi[v] = Q(1);
      if (lo[v] > hi[v]) lo[v] = hi[v];
    }
    for (int v = 0; v < arena.size(); ++v) {
      CHECK(apply_operator_at(arena, mech, lo, 1, v) <= apply_operator_at(arena, mech, hi, 1, v));
      CHECK(apply_operator_at(arena, mech, lo, 2, v) <= apply_operator_at(arena, mech, hi, 2, v));
    }
  }
}

TEST_CASE("exact-mode denominator cap raises DenominatorOverflow") {
  auto input = test::load_fixture("fig3.json");
  SolveOptions<Rational> opt;
  opt.max_denominator_bits = 2;
  CHECK_THROWS_AS(
      limit_threshold<Rational>(input.arena, input.mechanism, *input.objective, 1, opt),
      DenominatorOverflow);
}

TEST_CASE("iteration caps raise NotConverged with the final residual") {
  auto input = test::load_fixture("fig1a.json");
  SolveOptions<Rational> opt;
  opt.max_iterations = 1;
  CHECK_THROWS_AS(limit_threshold<Rational>(input.arena, input.mechanism, *input.objective, 1, opt),
                  NotConverged);
}
