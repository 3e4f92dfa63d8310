#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "bgc/arena.hpp"
#include "bgc/fixpoint.hpp"
#include "bgc/game.hpp"
#include "bgc/objective.hpp"
#include "bgc/reduction.hpp"

namespace bgc {

/// A parsed problem file: arena plus optional objective and mechanism.
struct ProblemInput {
  Arena arena;
  std::optional<Objective> objective;
  Mechanism mechanism = Mechanism::richman();
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reads {vertices:[{id, succ, r1, r2}], objective:{kind, set, fr?, bound?},
/// mechanism:{kind, tau?}}. Rationals accepted as "p/q" strings or decimals.
/// Throws ParseError with the full violation list on invalid arenas.
ProblemInput load_problem(const std::string& path);
ProblemInput parse_problem(const nlohmann::json& doc);

nlohmann::json arena_to_json(const Arena& arena);
nlohmann::json objective_to_json(const Arena& arena, const Objective& objective);

/// Turn-based game file: {vertices:[{id, owner, succ}], objective:{kind, set}}.
std::pair<TurnBasedArena, TurnBasedObjective> load_turn_based(const std::string& path);

template <class S>
nlohmann::json threshold_to_json(const Arena& arena, const ThresholdVector<S>& f) {
  nlohmann::json vals = nlohmann::json::object();
  for (int v = 0; v < arena.size(); ++v) {
    if constexpr (ScalarOps<S>::exact)
      vals[arena.id(v)] = format_rational(f.values[v]);
    else
      vals[arena.id(v)] = f.values[v];
  }
  return nlohmann::json{{"player", f.player},
                        {"horizon", f.is_limit() ? nlohmann::json("limit") : nlohmann::json(f.horizon)},
                        {"iterations", f.iterations},
                        {"residual", ScalarOps<S>::to_double(f.residual)},
                        {"values", vals}};
}

/// FNV-1a digest of a file's bytes, for the run report.
std::string file_digest(const std::string& path);

}  // namespace bgc
