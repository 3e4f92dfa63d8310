#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bgc/arena.hpp"
#include "bgc/objective.hpp"

namespace bgc {

/// Turn-based arena: every vertex is owned by exactly one player and has
/// at least one successor.
struct TurnBasedArena {
  std::vector<std::string> ids;
  std::vector<int> owner;               // 1 or 2 per vertex
  std::vector<std::vector<int>> succ;

  int size() const { return static_cast<int>(ids.size()); }
  int index(const std::string& id) const;
};

struct TurnBasedObjective {
  ObjectiveKind kind = ObjectiveKind::Reach;  // Reach / Safe / Buchi / CoBuchi
  std::vector<int> set;
};

struct ReducedGame {
  Arena arena;
  Objective objective;
  int sink1 = -1, sink2 = -1;  // indices of the added sinks
};

/// Encodes a turn-based game as a Richman bidding game with charging:
/// two self-looped sinks s1/s2, an escape edge v->s_i for every vertex
/// owned by player i, and charge `charge` for the owner at each owned
/// vertex. The objective is rewritten within its own class (s2 joins the
/// winning set, s1 stays losing). Thresholds at original vertices are
/// 0 or 1 and match the turn-based winner.
ReducedGame reduce_turn_based(const TurnBasedArena& tb, const TurnBasedObjective& objective,
                              const Rational& charge = Rational(2));

/// Classical attractor-based turn-based solver (oracle for
/// cross-validation). Returns the winning player (1 or 2) per vertex.
std::vector<int> solve_turn_based(const TurnBasedArena& tb, const TurnBasedObjective& objective);

}  // namespace bgc
