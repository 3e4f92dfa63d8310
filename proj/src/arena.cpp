#include "bgc/arena.hpp"

#include <set>
#include <sstream>

namespace bgc {

int Arena::index(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("unknown vertex id: " + id);
  return it->second;
}

struct ArenaBuilder {
  static Arena build(const RawArena& raw) {
    Arena a;
    for (const auto& v : raw.vertices) {
      a.index_.emplace(v.id, a.size());
      a.ids_.push_back(v.id);
    }
    for (const auto& v : raw.vertices) {
      std::vector<int> succ;
      succ.reserve(v.succ.size());
      for (const auto& t : v.succ) succ.push_back(a.index_.at(t));
      a.succ_.push_back(std::move(succ));
      Rational r1 = v.r1, r2 = v.r2;
      r1.canonicalize();
      r2.canonicalize();
      a.r1_.push_back(r1);
      a.r2_.push_back(r2);
    }
    return a;
  }
};

Arena Arena::with_added_charges1(const std::map<int, Rational>& delta) const {
  Arena copy = *this;
  for (const auto& [v, d] : delta) {
    if (v < 0 || v >= size()) throw std::out_of_range("charge delta on unknown vertex index");
    copy.r1_[v] += d;
    copy.r1_[v].canonicalize();
  }
  return copy;
}

std::string ValidationIssue::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case NoSuccessor:
      os << "vertex '" << vertex << "' has no successor";
      break;
    case NegativeCharge:
      os << "vertex '" << vertex << "' has negative charge for player " << detail;
      break;
    case DanglingEdge:
      os << "vertex '" << vertex << "' has an edge to unknown vertex '" << detail << "'";
      break;
    case DuplicateEdge:
      os << "vertex '" << vertex << "' lists successor '" << detail << "' more than once";
      break;
    case DuplicateVertex:
      os << "vertex id '" << vertex << "' is declared more than once";
      break;
  }
  return os.str();
}

std::variant<Arena, std::vector<ValidationIssue>> validate_arena(const RawArena& raw) {
  std::vector<ValidationIssue> issues;
  std::set<std::string> seen;
  for (const auto& v : raw.vertices) {
    if (!seen.insert(v.id).second)
      issues.push_back({ValidationIssue::DuplicateVertex, v.id, ""});
  }
  for (const auto& v : raw.vertices) {
    if (v.succ.empty()) issues.push_back({ValidationIssue::NoSuccessor, v.id, ""});
    if (v.r1 < 0) issues.push_back({ValidationIssue::NegativeCharge, v.id, "1"});
    if (v.r2 < 0) issues.push_back({ValidationIssue::NegativeCharge, v.id, "2"});
    std::set<std::string> targets;
    for (const auto& t : v.succ) {
      if (seen.count(t) == 0) issues.push_back({ValidationIssue::DanglingEdge, v.id, t});
      else if (!targets.insert(t).second)
        issues.push_back({ValidationIssue::DuplicateEdge, v.id, t});
    }
  }
  if (!issues.empty()) return issues;
  return ArenaBuilder::build(raw);
}

Arena build_arena(const RawArena& raw) {
  auto result = validate_arena(raw);
  if (auto* issues = std::get_if<std::vector<ValidationIssue>>(&result)) {
    std::string msg = "invalid arena:";
    for (const auto& i : *issues) msg += "\n  " + i.to_string();
    throw std::invalid_argument(msg);
  }
  return std::get<Arena>(std::move(result));
}

}  // namespace bgc
