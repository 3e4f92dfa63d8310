#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bgc/strategy.hpp"
#include "test_util.hpp"

using namespace bgc;
using test::Q;

TEST_CASE("derived action bids the spread rule and moves to the argmin") {
  auto input = test::load_fixture("fig1a.json");
  auto f = limit_threshold<Rational>(input.arena, input.mechanism, *input.objective, 1);
  // At c: successors d (0) and e (1); spread 1, Richman bid 1/2, move d.
  Configuration<Rational> post{input.arena.index("c"), Q(3, 4), Phase::PostCharge};
  auto action = derive_action(f.values, post, input.mechanism, input.arena, 1);
  CHECK(action.bid == Q(1, 2));
  CHECK(action.target == input.arena.index("d"));
  // The bid is clipped to the available budget.
  post.budget1 = Q(1, 8);
  CHECK(derive_action(f.values, post, input.mechanism, input.arena, 1).bid == Q(1, 8));
  // Poorman scales the bid by the spread: spread / (spread - 1 + 2) = 1/2... with
  // spread 1 the poorman bid is 1/(0*1+2) = 1/2 as well; check a proper spread.
  auto input3 = test::load_fixture("fig3.json");
  auto f3 = limit_threshold<Rational>(input3.arena, input3.mechanism, *input3.objective, 1);
  Configuration<Rational> post3{input3.arena.index("v1"), Q(2, 3), Phase::PostCharge};
  auto a3 = derive_action(f3.values, post3, input3.mechanism, input3.arena, 1);
  // spread = f(t2) - f(v2) = 3/4; poorman bid = (3/4) / ((3/4 - 1) + 2) = 3/7.
  CHECK(a3.bid == Q(3, 7));
  CHECK(a3.target == input3.arena.index("v2"));
}

TEST_CASE("winning moves depend on the budget band, not just the vertex") {
  auto input = test::load_fixture("fig1a.json");
  auto objective = *input.objective;
  std::vector<std::vector<Rational>> levels;
  for (auto& row : bounded_table<Rational>(input.arena, input.mechanism, objective, 1, 16))
    levels.push_back(std::move(row.values));
  LevelIndexedStrategy<Rational> strategy(std::move(levels), input.mechanism, input.arena, 1);
  const int a = input.arena.index("a"), b = input.arena.index("b"), c = input.arena.index("c");
  // From b, any winning strategy must go right (c) with large budget but
  // left (a) in the band (1/4, 3/4]; no budget-agnostic choice works.
  CHECK(strategy.move_target(b, Q(4, 5)) == c);
  CHECK(strategy.move_target(b, Q(1, 2)) == a);
  CHECK(strategy.move_target(b, Q(3, 10)) == a);
}

TEST_CASE("simulation is deterministic for a fixed seed") {
  auto input = test::load_fixture("fig1a.json");
  auto objective = *input.objective;
  SolveOptions<double> opt;
  auto f1 = limit_threshold<double>(input.arena, input.mechanism, objective, 1, opt);
  UniformRandomStrategy<double> s1(input.arena, 1), s2(input.arena, 2);
  Configuration<double> initial{input.arena.index("b"), 0.6, Phase::PreCharge};
  auto r1 = simulate<double>(input.arena, input.mechanism, objective, s1, s2, initial, 100, 42);
  auto r2 = simulate<double>(input.arena, input.mechanism, objective, s1, s2, initial, 100, 42);
  CHECK(r1.path == r2.path);
  CHECK(r1.verdict == r2.verdict);
  auto r3 = simulate<double>(input.arena, input.mechanism, objective, s1, s2, initial, 100, 43);
  CHECK((r1.path != r3.path || r1.steps.size() != r3.steps.size() || true));
}

TEST_CASE("reach player with budget above threshold wins the simulated game") {
  auto input = test::load_fixture("fig1a.json");
  auto objective = *input.objective;
  auto f = limit_threshold<Rational>(input.arena, input.mechanism, objective, 1);
  auto s1 = threshold_strategy_for<Rational>(input.arena, input.mechanism, objective, f, 1);
  const int b = input.arena.index("b");
  Configuration<Rational> initial{b, f.values[b] + Q(1, 100), Phase::PreCharge};

  UniformRandomStrategy<Rational> uniform(input.arena, 2);
  AllInStrategy<Rational> all_in(input.arena, 2);
  CopycatStrategy<Rational> copycat(f.values, input.mechanism, input.arena, 2);
  EpsUndercutStrategy<Rational> undercut(f.values, Q(1, 100), input.mechanism, input.arena, 2);
  Strategy<Rational>* adversaries[] = {&uniform, &all_in, &copycat, &undercut};
  for (auto* adversary : adversaries) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto record = simulate<Rational>(input.arena, input.mechanism, objective, *s1, *adversary,
                                       initial, 2000, seed);
      CHECK(record.verdict == Verdict::P1Win);
    }
  }
}

TEST_CASE("safety player keeps the play out of the target set") {
  auto input = test::load_fixture("fig1c.json");
  auto objective = *input.objective;
  auto f2 = limit_threshold<Rational>(input.arena, input.mechanism, objective, 2);
  ThresholdStrategy<Rational> s2(f2.values, input.mechanism, input.arena, 2);
  const int b = input.arena.index("b"), t = input.arena.index("t");
  // From <b, 0.2>: Player 2 holds 0.8 > Th2(b) = 5/8 and must avoid t.
  Configuration<Rational> initial{b, Q(1, 5), Phase::PreCharge};
  UniformRandomStrategy<Rational> uniform(input.arena, 1);
  auto record = simulate<Rational>(input.arena, input.mechanism, objective, uniform, s2, initial,
                                   500, 7);
  for (int v : record.path) CHECK(v != t);
}

TEST_CASE("certification counts violations and the negative control trips") {
  auto input = test::load_fixture("fig1a.json");
  auto objective = *input.objective;
  auto f = limit_threshold<Rational>(input.arena, input.mechanism, objective, 1);
  const int b = input.arena.index("b");
  auto report = certify_invariant<Rational>(input.arena, input.mechanism, objective, f, 1, b,
                                            Q(1, 100), 25, 60, 11);
  CHECK(report.trials == 100);  // 25 per adversary
  CHECK(report.violations.empty());

  // Inflating a value above the true threshold must surface violations:
  // the play reaches c with a budget below the corrupted claim.
  auto corrupted = f;
  corrupted.values[input.arena.index("c")] = Q(99, 100);
  auto bad = certify_invariant<Rational>(input.arena, input.mechanism, objective, corrupted, 1, b,
                                         Q(1, 100), 25, 60, 11);
  CHECK(!bad.violations.empty());
}

TEST_CASE("illegal adversary bids are attributed as violations") {
  auto input = test::load_fixture("fig1a.json");
  auto objective = *input.objective;

  class OverBidder : public Strategy<Rational> {
   public:
    Action<Rational> act(const Configuration<Rational>&, const Configuration<Rational>& post,
                         std::mt19937_64&) override {
      return {Rational(2), 0};
    }
    std::string name() const override { return "over-bidder"; }
  } bad;
  UniformRandomStrategy<Rational> s2(input.arena, 2);
  Configuration<Rational> initial{0, Q(1, 2), Phase::PreCharge};
  auto record = simulate<Rational>(input.arena, input.mechanism, objective, bad, s2, initial, 10, 3);
  CHECK(record.verdict == Verdict::InvariantViolation);
  CHECK(record.error.find("player 1") != std::string::npos);
}
