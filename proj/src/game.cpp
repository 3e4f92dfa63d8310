#include "bgc/game.hpp"

namespace bgc {

PrefixVerdict prefix_winner(std::span<const int> path, const Objective& objective) {
  switch (objective.kind) {
    case ObjectiveKind::Reach:
    case ObjectiveKind::FrugalReach:
      for (int v : path)
        if (objective.contains(v)) return PrefixVerdict::Player1Won;
      return PrefixVerdict::Undecided;
    case ObjectiveKind::Safe:
      for (int v : path)
        if (!objective.contains(v)) return PrefixVerdict::Player2Won;
      return PrefixVerdict::Undecided;
    case ObjectiveKind::BoundedReach: {
      long steps = 0;
      for (int v : path) {
        if (objective.contains(v)) return PrefixVerdict::Player1Won;
        if (steps++ >= objective.bound) return PrefixVerdict::Player2Won;
      }
      return PrefixVerdict::Undecided;
    }
    case ObjectiveKind::BoundedBuchi: {
      long visits = 0;
      for (int v : path)
        if (objective.contains(v) && ++visits >= objective.bound)
          return PrefixVerdict::Player1Won;
      return PrefixVerdict::Undecided;
    }
    case ObjectiveKind::Buchi:
    case ObjectiveKind::CoBuchi:
      throw std::logic_error("UnboundedObjectiveNeedsInvariantCheck");
  }
  return PrefixVerdict::Undecided;
}

}  // namespace bgc
