#include "bgc/json_io.hpp"

#include <fstream>
#include <sstream>

namespace bgc {
namespace {

using nlohmann::json;

Rational rational_field(const json& node) {
  if (node.is_string()) return parse_rational(node.get<std::string>());
  if (node.is_number_integer()) return Rational(node.get<long>());
  if (node.is_number_float()) {
    std::ostringstream os;
    os.precision(17);
    os << node.get<double>();
    return parse_rational(os.str());
  }
  throw ParseError("expected a rational ('p/q' string, integer, or decimal)");
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return doc;
}

std::vector<int> vertex_set(const json& node, const Arena& arena) {
  std::vector<int> set;
  for (const auto& id : node) {
    if (!id.is_string() || !arena.has_vertex(id.get<std::string>()))
      throw ParseError("objective set contains an unknown vertex");
    set.push_back(arena.index(id.get<std::string>()));
  }
  return set;
}

Objective parse_objective(const json& node, const Arena& arena) {
  const std::string kind = node.at("kind").get<std::string>();
  std::vector<int> set = vertex_set(node.at("set"), arena);
  if (kind == "reach") return Objective::reach(std::move(set));
  if (kind == "safe") return Objective::safe(std::move(set));
  if (kind == "buchi") return Objective::buchi(std::move(set));
  if (kind == "cobuchi") return Objective::cobuchi(std::move(set));
  if (kind == "frugal-reach") {
    std::map<int, Rational> fr;
    for (const auto& [id, value] : node.at("fr").items()) {
      if (!arena.has_vertex(id)) throw ParseError("frugal budget on unknown vertex " + id);
      fr[arena.index(id)] = rational_field(value);
    }
    return Objective::frugal_reach(std::move(set), std::move(fr));
  }
  if (kind == "bounded-reach") return Objective::bounded_reach(std::move(set), node.at("bound").get<long>());
  if (kind == "bounded-buchi") return Objective::bounded_buchi(std::move(set), node.at("bound").get<long>());
  throw ParseError("unknown objective kind: " + kind);
}

Mechanism parse_mechanism(const json& node) {
  const std::string kind = node.at("kind").get<std::string>();
  if (kind == "richman") return Mechanism::richman();
  if (kind == "poorman") return Mechanism::poorman();
  if (kind == "taxman") {
    Rational tau = rational_field(node.at("tau"));
    if (tau < 0 || tau > 1) throw ParseError("taxman tau must lie in [0,1]");
    return Mechanism::taxman(std::move(tau));
  }
  throw ParseError("unknown mechanism kind: " + kind);
}

}  // namespace

ProblemInput parse_problem(const json& doc) {
  RawArena raw;
  for (const auto& v : doc.at("vertices")) {
    RawVertex rv;
    rv.id = v.at("id").get<std::string>();
    for (const auto& s : v.at("succ")) rv.succ.push_back(s.get<std::string>());
    rv.r1 = v.contains("r1") ? rational_field(v.at("r1")) : Rational(0);
    rv.r2 = v.contains("r2") ? rational_field(v.at("r2")) : Rational(0);
    raw.vertices.push_back(std::move(rv));
  }
  auto validated = validate_arena(raw);
  if (auto* issues = std::get_if<std::vector<ValidationIssue>>(&validated)) {
    std::string msg = "invalid arena:";
    for (const auto& i : *issues) msg += "\n  " + i.to_string();
    throw ParseError(msg);
  }

  ProblemInput input{std::get<Arena>(std::move(validated)), std::nullopt, Mechanism::richman()};
  if (doc.contains("objective")) input.objective = parse_objective(doc.at("objective"), input.arena);
  if (doc.contains("mechanism")) input.mechanism = parse_mechanism(doc.at("mechanism"));
  return input;
}

ProblemInput load_problem(const std::string& path) { return parse_problem(load_json(path)); }

json arena_to_json(const Arena& arena) {
  json vertices = json::array();
  for (int v = 0; v < arena.size(); ++v) {
    json succ = json::array();
    for (int w : arena.successors(v)) succ.push_back(arena.id(w));
    vertices.push_back({{"id", arena.id(v)},
                        {"succ", succ},
                        {"r1", format_rational(arena.charge1(v))},
                        {"r2", format_rational(arena.charge2(v))}});
  }
  return json{{"vertices", vertices}};
}

json objective_to_json(const Arena& arena, const Objective& objective) {
  static const std::map<ObjectiveKind, std::string> names = {
      {ObjectiveKind::Reach, "reach"},
      {ObjectiveKind::Safe, "safe"},
      {ObjectiveKind::Buchi, "buchi"},
      {ObjectiveKind::CoBuchi, "cobuchi"},
      {ObjectiveKind::FrugalReach, "frugal-reach"},
      {ObjectiveKind::BoundedReach, "bounded-reach"},
      {ObjectiveKind::BoundedBuchi, "bounded-buchi"}};
  json set = json::array();
  for (int v : objective.set) set.push_back(arena.id(v));
  json out{{"kind", names.at(objective.kind)}, {"set", set}};
  if (objective.kind == ObjectiveKind::FrugalReach) {
    json fr = json::object();
    for (const auto& [v, budget] : objective.frugal) fr[arena.id(v)] = format_rational(budget);
    out["fr"] = fr;
  }
  if (objective.kind == ObjectiveKind::BoundedReach || objective.kind == ObjectiveKind::BoundedBuchi)
    out["bound"] = objective.bound;
  return out;
}

std::pair<TurnBasedArena, TurnBasedObjective> load_turn_based(const std::string& path) {
  json doc = load_json(path);
  TurnBasedArena tb;
  std::map<std::string, int> index;
  for (const auto& v : doc.at("vertices")) {
    index.emplace(v.at("id").get<std::string>(), tb.size());
    tb.ids.push_back(v.at("id").get<std::string>());
    tb.owner.push_back(v.at("owner").get<int>());
  }
  for (const auto& v : doc.at("vertices")) {
    std::vector<int> succ;
    for (const auto& s : v.at("succ")) {
      auto it = index.find(s.get<std::string>());
      if (it == index.end()) throw ParseError("edge to unknown vertex " + s.get<std::string>());
      succ.push_back(it->second);
    }
    if (succ.empty()) throw ParseError("turn-based vertex without successor");
    tb.succ.push_back(std::move(succ));
  }
  for (int owner : tb.owner)
    if (owner != 1 && owner != 2) throw ParseError("vertex owner must be 1 or 2");

  TurnBasedObjective objective;
  const json& obj = doc.at("objective");
  const std::string kind = obj.at("kind").get<std::string>();
  if (kind == "reach") objective.kind = ObjectiveKind::Reach;
  else if (kind == "safe") objective.kind = ObjectiveKind::Safe;
  else if (kind == "buchi") objective.kind = ObjectiveKind::Buchi;
  else if (kind == "cobuchi") objective.kind = ObjectiveKind::CoBuchi;
  else throw ParseError("turn-based objective must be reach/safe/buchi/cobuchi");
  for (const auto& id : obj.at("set")) {
    auto it = index.find(id.get<std::string>());
    if (it == index.end()) throw ParseError("objective set contains an unknown vertex");
    objective.set.push_back(it->second);
  }
  return {std::move(tb), std::move(objective)};
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::uint64_t hash = 1469598103934665603ull;  // FNV-1a
  char c;
  while (in.get(c)) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << hash;
  return os.str();
}

}  // namespace bgc
