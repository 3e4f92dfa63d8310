#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "bgc/rational.hpp"

namespace bgc {

/// Game board: directed graph with per-vertex charge pair (R1, R2).
/// Vertices carry string ids externally and dense indices internally;
/// declaration order is the canonical order (deterministic tie-breaking).
class Arena {
 public:
  int size() const { return static_cast<int>(ids_.size()); }
  const std::string& id(int v) const { return ids_[v]; }
  int index(const std::string& id) const;  // throws on unknown id
  bool has_vertex(const std::string& id) const { return index_.count(id) != 0; }
  const std::vector<int>& successors(int v) const { return succ_[v]; }
  const Rational& charge1(int v) const { return r1_[v]; }
  const Rational& charge2(int v) const { return r2_[v]; }
  const std::vector<std::string>& ids() const { return ids_; }

  /// 1 + R1(v) + R2(v), the charge-and-normalize denominator at v.
  Rational charge_factor(int v) const { return 1 + r1_[v] + r2_[v]; }

  /// Returns a copy with player-1 charges increased by delta (vertex -> added charge).
  Arena with_added_charges1(const std::map<int, Rational>& delta) const;

 private:
  friend struct ArenaBuilder;
  std::vector<std::string> ids_;
  std::map<std::string, int> index_;
  std::vector<std::vector<int>> succ_;
  std::vector<Rational> r1_, r2_;
};

struct RawVertex {
  std::string id;
  std::vector<std::string> succ;
  Rational r1, r2;
};

struct RawArena {
  std::vector<RawVertex> vertices;
};

struct ValidationIssue {
  enum Kind { NoSuccessor, NegativeCharge, DanglingEdge, DuplicateEdge, DuplicateVertex };
  Kind kind;
  std::string vertex;
  std::string detail;  // target id for edges, "1"/"2" for charge player
  std::string to_string() const;
};

/// Checks every invariant and returns either the arena or the complete
/// list of violations.
std::variant<Arena, std::vector<ValidationIssue>> validate_arena(const RawArena& raw);

/// validate_arena that throws on violations; for trusted fixture input.
Arena build_arena(const RawArena& raw);

}  // namespace bgc
