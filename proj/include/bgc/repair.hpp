#pragma once

#include <map>
#include <stdexcept>

#include "bgc/arena.hpp"
#include "bgc/game.hpp"
#include "bgc/objective.hpp"

namespace bgc {

/// Find Player-1 charge additions of total sum <= budget that bring the
/// player-1 limit threshold at `vertex` to or below `target`.
struct RepairInstance {
  Arena arena;
  int vertex = 0;
  Objective objective;
  Mechanism mech;
  Rational budget = 0;
  Rational target = Rational(1, 2);
};

struct RepairResult {
  std::map<int, Rational> delta;  // vertex -> added player-1 charge
  Rational achieved = 1;          // threshold at the instance vertex
  bool success = false;           // achieved <= target
  bool verified = false;          // independent re-verification confirmed
  long candidates_evaluated = 0;
  long candidates_enumerated = 0;
  Rational grid = 0;
};

struct InadmissibleRepair : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct SearchSpaceTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Builds the repaired arena and returns the exact player-1 limit
/// threshold at the instance vertex. Throws InadmissibleRepair on
/// negative entries or sums above the repair budget.
Rational verify_repair(const RepairInstance& instance, const std::map<int, Rational>& delta);

/// Grid search over allocations of total charge <= budget on at most
/// `support` vertices in multiples of `grid`, in lexicographic candidate
/// order, pruned by charge monotonicity (a failed allocation rules out
/// every pointwise-smaller one). Returns the first success, else the best
/// candidate found with success = false.
RepairResult repair_search(const RepairInstance& instance, const Rational& grid, int support,
                           long candidate_cap = 1000000);

}  // namespace bgc
