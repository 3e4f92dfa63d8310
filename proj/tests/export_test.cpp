#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bgc/buchi.hpp"
#include "bgc/fixpoint.hpp"
#include "bgc/model_export.hpp"
#include "test_util.hpp"

using namespace bgc;
using namespace bgc::model;
using test::Q;

namespace {

std::map<std::string, Rational> threshold_assignment(const ProblemInput& input) {
  auto f = limit_threshold<Rational>(input.arena, input.mechanism, *input.objective, 1);
  std::map<std::string, Rational> assignment;
  for (int v = 0; v < input.arena.size(); ++v)
    assignment["h_" + input.arena.id(v)] = f.values[v];
  return assignment;
}

}  // namespace

TEST_CASE("reach MILP accepts the computed thresholds with zero residual") {
  for (const char* name : {"fig1a.json", "fig1c.json", "fig4.json"}) {
    CAPTURE(name);
    auto input = test::load_fixture(name);
    auto doc = export_reach_milp(input.arena, input.objective->set, input.mechanism);
    CHECK(doc.kind == ModelKind::MILP);
    CHECK(doc.big_m > Q(1));
    auto report = check_model_residual(doc, threshold_assignment(input));
    for (const auto& v : report.violations) CAPTURE(v.constraint);
    CHECK(report.clean());
    CHECK(report.satisfied > 0);
  }
}

TEST_CASE("reach MILP flags perturbed thresholds") {
  auto input = test::load_fixture("fig1a.json");
  auto doc = export_reach_milp(input.arena, input.objective->set, input.mechanism);
  auto assignment = threshold_assignment(input);
  assignment["h_b"] += Q(1, 7);
  auto report = check_model_residual(doc, assignment);
  CHECK(!report.clean());
  CHECK(report.max_violation > Q(0));
}

TEST_CASE("reach MILP maximization admits smaller fixed points as feasible") {
  // The all-zero vector is also a fixed point of the update operator on
  // this arena; it must satisfy the constraints while scoring a smaller
  // objective than the greatest fixed point.
  auto input = test::load_fixture("fig4.json");
  auto doc = export_reach_milp(input.arena, input.objective->set, input.mechanism);
  std::map<std::string, Rational> zero;
  for (int v = 0; v < input.arena.size(); ++v) zero["h_" + input.arena.id(v)] = Q(0);
  auto report = check_model_residual(doc, zero);
  for (const auto& v : report.violations) CAPTURE(v.constraint);
  CHECK(report.clean());

  auto value = [&](const std::map<std::string, Rational>& a) {
    Rational s(0);
    for (const auto& t : doc.objective) s += t.coeff * a.at(t.var);
    return s;
  };
  CHECK(value(zero) < value(threshold_assignment(input)));
}

TEST_CASE("MILP export refuses non-Richman mechanisms") {
  auto input = test::load_fixture("fig3.json");
  CHECK_THROWS_AS(export_reach_milp(input.arena, input.objective->set, input.mechanism),
                  NonRichmanMILPUnsupported);
}

TEST_CASE("residual checker reports missing h-variables") {
  auto input = test::load_fixture("fig1a.json");
  auto doc = export_reach_milp(input.arena, input.objective->set, input.mechanism);
  auto assignment = threshold_assignment(input);
  assignment.erase("h_c");
  CHECK_THROWS_AS(check_model_residual(doc, assignment), MissingVariable);
}

TEST_CASE("real-arithmetic reach formula holds at the computed thresholds") {
  SUBCASE("poorman arena") {
    auto input = test::load_fixture("fig3.json");
    auto doc = export_reach_etr(input.arena, input.objective->set, input.mechanism);
    CHECK(doc.kind == ModelKind::ETR);
    CHECK(doc.logic == "QF_NRA");
    auto assignment = threshold_assignment(input);
    CHECK(assignment["h_v1"] == Q(4, 7));
    CHECK(assignment["h_v2"] == Q(1, 4));
    auto report = check_model_residual(doc, assignment);
    for (const auto& v : report.violations) CAPTURE(v.constraint);
    CHECK(report.clean());
  }
  SUBCASE("all-target arena forces h == 0") {
    auto input = test::load_fixture("fig1a.json");
    std::vector<int> all;
    for (int v = 0; v < input.arena.size(); ++v) all.push_back(v);
    auto doc = export_reach_etr(input.arena, all, input.mechanism);
    std::map<std::string, Rational> zero, nonzero;
    for (int v = 0; v < input.arena.size(); ++v) {
      zero["h_" + input.arena.id(v)] = Q(0);
      nonzero["h_" + input.arena.id(v)] = Q(0);
    }
    nonzero["h_b"] = Q(1, 3);
    CHECK(check_model_residual(doc, zero).clean());
    CHECK(!check_model_residual(doc, nonzero).clean());
  }
  SUBCASE("clamp-at-one branch") {
    auto input = test::load_fixture("fig1c.json");
    auto doc = export_reach_etr(input.arena, input.objective->set, input.mechanism);
    auto assignment = threshold_assignment(input);
    CHECK(assignment["h_a"] == Q(1));
    CHECK(assignment["h_b"] == Q(3, 8));
    CHECK(assignment["h_t"] == Q(0));
    auto report = check_model_residual(doc, assignment);
    for (const auto& v : report.violations) CAPTURE(v.constraint);
    CHECK(report.clean());
  }
}

TEST_CASE("Buchi documents accept the computed limit vectors") {
  SUBCASE("Richman bilevel on an absorbing accepting vertex") {
    auto input = test::load_fixture("fig1a.json");
    const std::vector<int> b_set{input.arena.index("d")};
    auto doc = export_buchi_bilevel(input.arena, b_set, input.mechanism);
    CHECK(doc.kind == ModelKind::BilevelQuantified);
    CHECK(!doc.inner_objective.empty());
    auto g = buchi_threshold<Rational>(input.arena, input.mechanism, b_set, 1);
    std::map<std::string, Rational> assignment;
    for (int v = 0; v < input.arena.size(); ++v)
      assignment["h_" + input.arena.id(v)] = g.values[v];
    auto report = check_model_residual(doc, assignment);
    for (const auto& v : report.violations) CAPTURE(v.constraint);
    CHECK(report.clean());
  }
  SUBCASE("Richman bilevel on the strongly connected arena") {
    // This game stabilizes only in the limit: the document is checked
    // against the approximate vector, tolerating solver-precision slack.
    auto input = test::load_fixture("fig1c_scc.json");
    const std::vector<int> b_set{input.arena.index("t")};
    auto doc = export_buchi_bilevel(input.arena, b_set, input.mechanism);
    auto g = buchi_threshold<double>(input.arena, input.mechanism, b_set, 1);
    std::map<std::string, Rational> assignment;
    for (int v = 0; v < input.arena.size(); ++v)
      assignment["h_" + input.arena.id(v)] = Rational(g.values[v]);
    auto report = check_model_residual(doc, assignment);
    for (const auto& v : report.violations) CAPTURE(v.constraint);
    CHECK(report.max_violation < Q(1, 1000000));
  }
  SUBCASE("non-Richman mechanisms produce the quantified formula") {
    auto input = test::load_fixture("fig3.json");
    std::vector<int> b_set{input.arena.index("t1")};
    auto doc = export_buchi_bilevel(input.arena, b_set, input.mechanism);
    CHECK(doc.kind == ModelKind::BilevelQuantified);
    CHECK(doc.logic == "NRA");
    auto g = buchi_threshold<Rational>(input.arena, input.mechanism, b_set, 1);
    std::map<std::string, Rational> assignment;
    for (int v = 0; v < input.arena.size(); ++v)
      assignment["h_" + input.arena.id(v)] = g.values[v];
    // Universally quantified assertions are skipped; the existential part
    // must hold at the solver's vector.
    auto report = check_model_residual(doc, assignment);
    for (const auto& v : report.violations) CAPTURE(v.constraint);
    CHECK(report.clean());
  }
}

TEST_CASE("emitted documents round-trip through the bundled parsers") {
  auto fig1a = test::load_fixture("fig1a.json");
  auto fig3 = test::load_fixture("fig3.json");

  auto milp = export_reach_milp(fig1a.arena, fig1a.objective->set, fig1a.mechanism);
  auto milp_text = emit(milp);
  CHECK(parse(milp_text).structurally_equal(milp));

  auto etr = export_reach_etr(fig3.arena, fig3.objective->set, fig3.mechanism);
  CHECK(parse(emit(etr)).structurally_equal(etr));

  auto bilevel =
      export_buchi_bilevel(fig1a.arena, {fig1a.arena.index("d")}, fig1a.mechanism);
  CHECK(parse(emit(bilevel)).structurally_equal(bilevel));

  auto quantified = export_buchi_bilevel(fig3.arena, {fig3.arena.index("t1")}, fig3.mechanism);
  CHECK(parse(emit(quantified)).structurally_equal(quantified));

  // A round-tripped document still evaluates assignments identically.
  auto reparsed = parse(milp_text);
  auto assignment = threshold_assignment(fig1a);
  CHECK(check_model_residual(reparsed, assignment).clean());
}
