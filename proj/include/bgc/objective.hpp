#pragma once

#include <map>
#include <vector>

#include "bgc/arena.hpp"
#include "bgc/rational.hpp"

namespace bgc {

enum class ObjectiveKind { Reach, Safe, Buchi, CoBuchi, FrugalReach, BoundedReach, BoundedBuchi };

/// Win condition for Player 1 (Player 2 implicitly gets the complement).
/// `set` is the defining vertex set: targets for Reach, safe vertices for
/// Safe, and so on. Frugal budgets map target vertices to [0,1].
struct Objective {
  ObjectiveKind kind = ObjectiveKind::Reach;
  std::vector<int> set;
  std::map<int, Rational> frugal;  // FrugalReach only
  long bound = 0;                  // horizon t / visit count k for bounded kinds

  static Objective reach(std::vector<int> t);
  static Objective safe(std::vector<int> s);
  static Objective buchi(std::vector<int> b);
  static Objective cobuchi(std::vector<int> c);
  static Objective frugal_reach(std::vector<int> t, std::map<int, Rational> fr);
  static Objective bounded_reach(std::vector<int> t, long horizon);
  static Objective bounded_buchi(std::vector<int> b, long visits);

  bool contains(int v) const;

  /// Safe(S) rewritten as Reach(V\S) and CoBuchi(C) as Buchi(V\C); other
  /// kinds returned unchanged. Player 1 is always the reach/Buchi
  /// protagonist after normalization.
  Objective normalized(const Arena& arena) const;
};

/// Complement of `set` within the arena, in declaration order.
std::vector<int> complement_set(const Arena& arena, const std::vector<int>& set);

}  // namespace bgc
