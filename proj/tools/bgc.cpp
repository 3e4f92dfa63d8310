// Command-line front end: solve, table, simulate, repair, reduce, export,
// check. Exit codes: 0 ok, 1 parse/validation error, 2 non-convergence,
// 3 violations found by `check`.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bgc/buchi.hpp"
#include "bgc/fixpoint.hpp"
#include "bgc/json_io.hpp"
#include "bgc/model_export.hpp"
#include "bgc/reduction.hpp"
#include "bgc/repair.hpp"
#include "bgc/strategy.hpp"

using nlohmann::json;

namespace {

struct GlobalOptions {
  std::string mode = "exact";
  double eps = 1e-9;
  long max_iter = 1000000;
  std::uint64_t seed = 1;
  std::string out;
  bool timing = false;
};

void add_global_flags(CLI::App* cmd, GlobalOptions& opt) {
  cmd->add_option("--mode", opt.mode, "Arithmetic mode")->check(CLI::IsMember({"exact", "approx"}));
  cmd->add_option("--eps", opt.eps, "Convergence tolerance (approx mode)");
  cmd->add_option("--max-iter", opt.max_iter, "Iteration cap");
  cmd->add_option("--seed", opt.seed, "RNG seed");
  cmd->add_option("--out", opt.out, "Write output to a file instead of stdout");
  cmd->add_flag("--timing", opt.timing, "Include wall-clock timing in the report");
}

void write_output(const GlobalOptions& opt, const std::string& text) {
  if (opt.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
  } else {
    std::ofstream f(opt.out);
    if (!f) throw bgc::ParseError("cannot write " + opt.out);
    f << text;
  }
}

bgc::Objective parse_objective_spec(const std::string& spec, const bgc::Arena& arena) {
  auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw bgc::ParseError("objective spec must look like kind:v1,v2");
  const std::string kind = spec.substr(0, colon);
  std::vector<int> set;
  std::stringstream ids(spec.substr(colon + 1));
  std::string id;
  while (std::getline(ids, id, ','))
    if (!id.empty()) set.push_back(arena.index(id));
  if (kind == "reach") return bgc::Objective::reach(std::move(set));
  if (kind == "safe") return bgc::Objective::safe(std::move(set));
  if (kind == "buchi") return bgc::Objective::buchi(std::move(set));
  if (kind == "cobuchi") return bgc::Objective::cobuchi(std::move(set));
  throw bgc::ParseError("unknown objective kind in spec: " + kind);
}

bgc::Objective resolve_objective(const bgc::ProblemInput& input, const std::string& spec) {
  if (!spec.empty()) return parse_objective_spec(spec, input.arena);
  if (input.objective) return *input.objective;
  throw bgc::ParseError("no objective: pass --objective or add one to the arena file");
}

template <class S>
bgc::ThresholdVector<S> solve_threshold(const bgc::ProblemInput& input,
                                        const bgc::Objective& objective, int player,
                                        const bgc::SolveOptions<S>& solve_opt,
                                        std::vector<S>* trace = nullptr) {
  switch (objective.kind) {
    case bgc::ObjectiveKind::Buchi:
      return bgc::buchi_threshold<S>(input.arena, input.mechanism, objective.set, player, solve_opt);
    case bgc::ObjectiveKind::CoBuchi:
      return bgc::cobuchi_threshold<S>(input.arena, input.mechanism, objective.set, player,
                                       solve_opt);
    default:
      return bgc::limit_threshold<S>(input.arena, input.mechanism, objective, player, solve_opt,
                                     trace);
  }
}

template <class S>
bgc::SolveOptions<S> make_solve_options(const GlobalOptions& opt) {
  bgc::SolveOptions<S> s;
  s.max_iterations = opt.max_iter;
  if constexpr (!bgc::ScalarOps<S>::exact) s.eps = opt.eps;
  return s;
}

json run_report(const GlobalOptions& opt, const std::string& command, const std::string& arena_path,
                double seconds) {
  json report{{"command", command}, {"input", arena_path}, {"mode", opt.mode}};
  if (!arena_path.empty()) report["input_digest"] = bgc::file_digest(arena_path);
  if (opt.mode == "approx") report["eps"] = opt.eps;
  if (opt.timing) report["seconds"] = seconds;
  return report;
}

// Exact solve with the documented fallback: on denominator overflow,
// print a warning and redo the computation in approximate mode.
json solve_any_mode(const GlobalOptions& opt, const bgc::ProblemInput& input,
                    const bgc::Objective& objective, int player, json& report) {
  if (opt.mode == "exact") {
    try {
      auto f = solve_threshold<bgc::Rational>(input, objective, player,
                                              make_solve_options<bgc::Rational>(opt));
      return bgc::threshold_to_json(input.arena, f);
    } catch (const bgc::DenominatorOverflow& e) {
      std::cerr << "warning: " << e.what() << "; falling back to approximate mode\n";
      report["mode"] = "approx-fallback";
    }
  }
  auto f = solve_threshold<double>(input, objective, player, make_solve_options<double>(opt));
  return bgc::threshold_to_json(input.arena, f);
}

int cmd_solve(const GlobalOptions& opt, const std::string& arena_path, const std::string& obj_spec,
              int player, const std::string& vertex, bool decide) {
  const auto t0 = std::chrono::steady_clock::now();
  bgc::ProblemInput input = bgc::load_problem(arena_path);
  bgc::Objective objective = resolve_objective(input, obj_spec);
  json report = run_report(opt, "solve", arena_path, 0);
  json result = solve_any_mode(opt, input, objective, player, report);
  report["player"] = player;
  report["objective"] = bgc::objective_to_json(input.arena, objective);
  report["result"] = result;
  if (opt.timing)
    report["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (decide) {
    if (vertex.empty()) throw bgc::ParseError("--decide needs --vertex");
    const json& value = result.at("values").at(vertex);
    bool accept;
    if (value.is_string())
      accept = bgc::parse_rational(value.get<std::string>()) <= bgc::Rational(1, 2);
    else
      accept = value.get<double>() <= 0.5;
    write_output(opt, std::string(accept ? "ACCEPT" : "REJECT"));
    return 0;
  }
  write_output(opt, report.dump(2));
  return 0;
}

int cmd_table(const GlobalOptions& opt, const std::string& arena_path, const std::string& obj_spec,
              int player, long horizon, const std::string& format) {
  bgc::ProblemInput input = bgc::load_problem(arena_path);
  bgc::Objective objective = resolve_objective(input, obj_spec);

  if (format == "plotdata") {
    std::ostringstream os;
    os << "iteration,residual\n";
    std::vector<double> trace;
    auto solve_opt = make_solve_options<double>(opt);
    solve_threshold<double>(input, objective, player, solve_opt, &trace);
    for (std::size_t i = 0; i < trace.size(); ++i) os << (i + 1) << "," << trace[i] << "\n";
    write_output(opt, os.str());
    return 0;
  }

  std::ostringstream os;
  os << "t";
  for (int v = 0; v < input.arena.size(); ++v) os << "," << input.arena.id(v);
  os << "\n";
  if (opt.mode == "exact") {
    auto rows = bgc::bounded_table<bgc::Rational>(input.arena, input.mechanism, objective, player,
                                                  horizon);
    for (long t = 0; t <= horizon; ++t) {
      os << t;
      for (const auto& x : rows[t].values) os << "," << bgc::format_rational(x);
      os << "\n";
    }
  } else {
    auto rows = bgc::bounded_table<double>(input.arena, input.mechanism, objective, player, horizon);
    for (long t = 0; t <= horizon; ++t) {
      os << t;
      for (double x : rows[t].values) os << "," << x;
      os << "\n";
    }
  }
  write_output(opt, os.str());
  return 0;
}

std::unique_ptr<bgc::Strategy<double>> make_strategy(const std::string& kind,
                                                     const bgc::ProblemInput& input,
                                                     const bgc::Objective& objective,
                                                     const bgc::ThresholdVector<double>& f,
                                                     int player, double eps) {
  if (kind == "threshold")
    return bgc::threshold_strategy_for<double>(input.arena, input.mechanism, objective, f, player);
  if (kind == "uniform")
    return std::make_unique<bgc::UniformRandomStrategy<double>>(input.arena, player);
  if (kind == "allin") return std::make_unique<bgc::AllInStrategy<double>>(input.arena, player);
  if (kind == "copycat")
    return std::make_unique<bgc::CopycatStrategy<double>>(f.values, input.mechanism, input.arena,
                                                          player);
  if (kind == "undercut")
    return std::make_unique<bgc::EpsUndercutStrategy<double>>(f.values, eps, input.mechanism,
                                                              input.arena, player);
  throw bgc::ParseError("unknown strategy: " + kind);
}

int cmd_simulate(const GlobalOptions& opt, const std::string& arena_path,
                 const std::string& obj_spec, const std::string& start, double budget, long steps,
                 const std::string& s1_kind, const std::string& s2_kind) {
  bgc::ProblemInput input = bgc::load_problem(arena_path);
  bgc::Objective objective = resolve_objective(input, obj_spec);
  auto solve_opt = make_solve_options<double>(opt);
  auto f1 = solve_threshold<double>(input, objective, 1, solve_opt);
  auto f2 = solve_threshold<double>(input, objective, 2, solve_opt);
  auto s1 = make_strategy(s1_kind, input, objective, f1, 1, opt.eps);
  auto s2 = make_strategy(s2_kind, input, objective, f2, 2, opt.eps);

  bgc::Configuration<double> initial{input.arena.index(start), budget, bgc::Phase::PreCharge};
  auto record = bgc::simulate<double>(input.arena, input.mechanism, objective, *s1, *s2, initial,
                                      steps, opt.seed);
  json path = json::array();
  for (int v : record.path) path.push_back(input.arena.id(v));
  static const std::map<bgc::Verdict, std::string> names = {
      {bgc::Verdict::P1Win, "player1"},
      {bgc::Verdict::P2Win, "player2"},
      {bgc::Verdict::InvariantViolation, "invariant-violation"},
      {bgc::Verdict::Truncated, "truncated"}};
  json report = run_report(opt, "simulate", arena_path, 0);
  report["seed"] = opt.seed;
  report["strategies"] = {{"player1", s1->name()}, {"player2", s2->name()}};
  report["steps"] = record.steps.size();
  report["path"] = path;
  report["verdict"] = names.at(record.verdict);
  if (!record.error.empty()) report["error"] = record.error;
  write_output(opt, report.dump(2));
  return 0;
}

int cmd_repair(const GlobalOptions& opt, const std::string& arena_path, const std::string& obj_spec,
               const std::string& vertex, const std::string& budget, const std::string& grid,
               int support, const std::string& target) {
  bgc::ProblemInput input = bgc::load_problem(arena_path);
  bgc::RepairInstance instance{input.arena, input.arena.index(vertex),
                               resolve_objective(input, obj_spec), input.mechanism,
                               bgc::parse_rational(budget), bgc::parse_rational(target)};
  auto result = bgc::repair_search(instance, bgc::parse_rational(grid), support);
  json delta = json::object();
  for (const auto& [v, d] : result.delta) delta[input.arena.id(v)] = bgc::format_rational(d);
  json report = run_report(opt, "repair", arena_path, 0);
  report["vertex"] = vertex;
  report["budget"] = budget;
  report["grid"] = grid;
  report["support"] = support;
  report["result"] = {{"success", result.success},
                      {"verified", result.verified},
                      {"achieved", bgc::format_rational(result.achieved)},
                      {"delta", delta},
                      {"candidates_evaluated", result.candidates_evaluated},
                      {"candidates_enumerated", result.candidates_enumerated}};
  write_output(opt, report.dump(2));
  return 0;
}

int cmd_reduce(const GlobalOptions& opt, const std::string& tb_path) {
  auto [tb, objective] = bgc::load_turn_based(tb_path);
  auto reduced = bgc::reduce_turn_based(tb, objective);
  auto winners = bgc::solve_turn_based(tb, objective);

  json report = run_report(opt, "reduce", tb_path, 0);
  report["arena"] = bgc::arena_to_json(reduced.arena);
  report["objective"] = bgc::objective_to_json(reduced.arena, reduced.objective);
  report["sinks"] = {reduced.arena.id(reduced.sink1), reduced.arena.id(reduced.sink2)};
  json w = json::object();
  for (int v = 0; v < tb.size(); ++v) w[tb.ids[v]] = winners[v];
  report["turn_based_winner"] = w;
  write_output(opt, report.dump(2));
  return 0;
}

int cmd_export(const GlobalOptions& opt, const std::string& arena_path, const std::string& obj_spec,
               const std::string& format) {
  bgc::ProblemInput input = bgc::load_problem(arena_path);
  bgc::Objective objective = resolve_objective(input, obj_spec);
  bgc::model::ModelDocument doc;
  if (format == "milp") {
    auto norm = objective.normalized(input.arena);
    doc = bgc::model::export_reach_milp(input.arena, norm.set, input.mechanism);
  } else if (format == "etr") {
    auto norm = objective.normalized(input.arena);
    doc = bgc::model::export_reach_etr(input.arena, norm.set, input.mechanism);
  } else if (format == "bilevel") {
    auto norm = objective.normalized(input.arena);
    doc = bgc::model::export_buchi_bilevel(input.arena, norm.set, input.mechanism);
  } else {
    throw bgc::ParseError("unknown export format: " + format);
  }
  write_output(opt, bgc::model::emit(doc));
  return 0;
}

int cmd_check(const GlobalOptions& opt, const std::string& arena_path, const std::string& obj_spec,
              const std::string& model_path, const std::string& vertex, long trials, long steps) {
  bgc::ProblemInput input = bgc::load_problem(arena_path);
  bgc::Objective objective = resolve_objective(input, obj_spec);
  json report = run_report(opt, "check", arena_path, 0);

  if (!model_path.empty()) {
    std::ifstream in(model_path);
    if (!in) throw bgc::ParseError("cannot open " + model_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto doc = bgc::model::parse(buffer.str());
    auto f = solve_threshold<bgc::Rational>(input, objective, 1,
                                            make_solve_options<bgc::Rational>(opt));
    std::map<std::string, bgc::Rational> assignment;
    for (int v = 0; v < input.arena.size(); ++v)
      assignment["h_" + input.arena.id(v)] = f.values[v];
    auto residual = bgc::model::check_model_residual(doc, assignment);
    json violations = json::array();
    for (const auto& violation : residual.violations)
      violations.push_back(
          {{"constraint", violation.constraint}, {"slack", bgc::format_rational(violation.slack)}});
    report["model"] = model_path;
    report["satisfied"] = residual.satisfied;
    report["violations"] = violations;
    write_output(opt, report.dump(2));
    return residual.clean() ? 0 : 3;
  }

  if (vertex.empty()) throw bgc::ParseError("check needs --model or --vertex");
  auto f = solve_threshold<double>(input, objective, 1, make_solve_options<double>(opt));
  auto cert = bgc::certify_invariant<double>(input.arena, input.mechanism, objective, f, 1,
                                             input.arena.index(vertex), 0.01, trials, steps,
                                             opt.seed);
  json violations = json::array();
  for (const auto& violation : cert.violations)
    violations.push_back({{"adversary", violation.adversary},
                          {"trial", violation.trial},
                          {"step", violation.step},
                          {"vertex", input.arena.id(violation.vertex)},
                          {"budget", violation.budget},
                          {"required", violation.required}});
  report["trials"] = cert.trials;
  report["steps_checked"] = cert.steps_checked;
  report["violations"] = violations;
  write_output(opt, report.dump(2));
  return cert.violations.empty() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solver for two-player bidding games with charging"};
  app.require_subcommand(1);
  GlobalOptions opt;

  std::string arena_path, obj_spec, vertex, start, format, model_path, tb_path;
  std::string budget_str = "0", grid = "1", target = "1/2";
  int player = 1, support = 2;
  long horizon = 5, steps = 1000, trials = 100;
  double budget = 0.5;
  bool decide = false;
  std::string s1_kind = "threshold", s2_kind = "threshold";

  auto* solve = app.add_subcommand("solve", "Compute threshold budgets");
  solve->add_option("--arena", arena_path)->required();
  solve->add_option("--objective", obj_spec);
  solve->add_option("--player", player);
  solve->add_option("--vertex", vertex);
  solve->add_flag("--decide", decide, "Print ACCEPT iff Th1(vertex) <= 0.5");
  add_global_flags(solve, opt);

  auto* table = app.add_subcommand("table", "Finite-horizon threshold table");
  table->add_option("--arena", arena_path)->required();
  table->add_option("--objective", obj_spec);
  table->add_option("--player", player);
  table->add_option("--horizon", horizon);
  table->add_option("--format", format)->default_val("csv")->check(CLI::IsMember({"csv", "plotdata"}));
  add_global_flags(table, opt);

  auto* simulate = app.add_subcommand("simulate", "Play one game with chosen strategies");
  simulate->add_option("--arena", arena_path)->required();
  simulate->add_option("--objective", obj_spec);
  simulate->add_option("--start", start)->required();
  simulate->add_option("--budget", budget, "Player 1 initial budget");
  simulate->add_option("--steps", steps);
  simulate->add_option("--p1", s1_kind);
  simulate->add_option("--p2", s2_kind);
  add_global_flags(simulate, opt);

  auto* repair = app.add_subcommand("repair", "Search for charge repairs");
  repair->add_option("--arena", arena_path)->required();
  repair->add_option("--objective", obj_spec);
  repair->add_option("--vertex", vertex)->required();
  repair->add_option("--budget", budget_str)->required();
  repair->add_option("--grid", grid);
  repair->add_option("--support", support);
  repair->add_option("--target", target);
  add_global_flags(repair, opt);

  auto* reduce = app.add_subcommand("reduce", "Encode a turn-based game as a bidding game");
  reduce->add_option("--turn-based", tb_path)->required();
  add_global_flags(reduce, opt);

  auto* exporter = app.add_subcommand("export", "Emit an optimization encoding");
  exporter->add_option("--arena", arena_path)->required();
  exporter->add_option("--objective", obj_spec);
  exporter->add_option("--format", format)->required()->check(CLI::IsMember({"milp", "etr", "bilevel"}));
  add_global_flags(exporter, opt);

  auto* check = app.add_subcommand("check", "Residual-check a model or certify an invariant");
  check->add_option("--arena", arena_path)->required();
  check->add_option("--objective", obj_spec);
  check->add_option("--model", model_path);
  check->add_option("--vertex", vertex);
  check->add_option("--trials", trials);
  check->add_option("--steps", steps);
  add_global_flags(check, opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(opt, arena_path, obj_spec, player, vertex, decide);
    if (table->parsed()) return cmd_table(opt, arena_path, obj_spec, player, horizon, format);
    if (simulate->parsed())
      return cmd_simulate(opt, arena_path, obj_spec, start, budget, steps, s1_kind, s2_kind);
    if (repair->parsed())
      return cmd_repair(opt, arena_path, obj_spec, vertex, budget_str, grid, support, target);
    if (reduce->parsed()) return cmd_reduce(opt, tb_path);
    if (exporter->parsed()) return cmd_export(opt, arena_path, obj_spec, format);
    if (check->parsed())
      return cmd_check(opt, arena_path, obj_spec, model_path, vertex, trials, steps);
  } catch (const bgc::NotConverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
