#include "bgc/reduction.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

namespace bgc {
namespace {

// Vertices from which player p can force reaching `base` inside the
// subgame `alive`; classical backward counting.
std::vector<bool> attractor(const TurnBasedArena& tb, int p, const std::vector<bool>& base,
                            const std::vector<bool>& alive) {
  const int n = tb.size();
  std::vector<std::vector<int>> pred(n);
  std::vector<int> out_degree(n, 0);
  for (int v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    for (int w : tb.succ[v]) {
      if (!alive[w]) continue;
      pred[w].push_back(v);
      ++out_degree[v];
    }
  }
  std::vector<bool> attr(n, false);
  std::deque<int> queue;
  for (int v = 0; v < n; ++v)
    if (alive[v] && base[v]) {
      attr[v] = true;
      queue.push_back(v);
    }
  while (!queue.empty()) {
    const int w = queue.front();
    queue.pop_front();
    for (int v : pred[w]) {
      if (attr[v]) continue;
      if (tb.owner[v] == p || --out_degree[v] == 0) {
        attr[v] = true;
        queue.push_back(v);
      }
    }
  }
  return attr;
}

// Winning region of player p for "visit `accept` infinitely often".
std::vector<bool> buchi_region(const TurnBasedArena& tb, int p, std::vector<bool> accept) {
  const int n = tb.size();
  const int q = 3 - p;
  std::vector<bool> alive(n, true);
  while (true) {
    const auto can_reach = attractor(tb, p, accept, alive);
    std::vector<bool> dead(n, false);
    bool any_dead = false;
    for (int v = 0; v < n; ++v)
      if (alive[v] && !can_reach[v]) {
        dead[v] = true;
        any_dead = true;
      }
    if (!any_dead) {
      std::vector<bool> win(n, false);
      for (int v = 0; v < n; ++v) win[v] = alive[v];
      return win;
    }
    const auto lost = attractor(tb, q, dead, alive);
    for (int v = 0; v < n; ++v)
      if (lost[v]) {
        alive[v] = false;
        accept[v] = false;
      }
  }
}

}  // namespace

int TurnBasedArena::index(const std::string& id) const {
  auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) throw std::out_of_range("unknown vertex id: " + id);
  return static_cast<int>(it - ids.begin());
}

ReducedGame reduce_turn_based(const TurnBasedArena& tb, const TurnBasedObjective& objective,
                              const Rational& charge) {
  if (charge <= 1) throw std::invalid_argument("escape charge must exceed 1");
  const std::set<std::string> used(tb.ids.begin(), tb.ids.end());
  auto fresh = [&used](std::string base) {
    while (used.count(base)) base += "_";
    return base;
  };
  const std::string s1 = fresh("s1"), s2 = fresh("s2");

  RawArena raw;
  for (int v = 0; v < tb.size(); ++v) {
    RawVertex rv;
    rv.id = tb.ids[v];
    for (int w : tb.succ[v]) rv.succ.push_back(tb.ids[w]);
    rv.succ.push_back(tb.owner[v] == 1 ? s1 : s2);
    rv.r1 = tb.owner[v] == 1 ? charge : Rational(0);
    rv.r2 = tb.owner[v] == 2 ? charge : Rational(0);
    raw.vertices.push_back(std::move(rv));
  }
  raw.vertices.push_back({s1, {s1}, 0, 0});
  raw.vertices.push_back({s2, {s2}, 0, 0});

  ReducedGame game;
  game.arena = build_arena(raw);
  game.sink1 = game.arena.index(s1);
  game.sink2 = game.arena.index(s2);

  // Original indices survive unchanged (sinks are appended), so the
  // objective set carries over; s2 joins every winning set and s1 stays
  // losing for Player 1.
  std::vector<int> set = objective.set;
  set.push_back(game.sink2);
  switch (objective.kind) {
    case ObjectiveKind::Reach:
      game.objective = Objective::reach(std::move(set));
      break;
    case ObjectiveKind::Safe:
      game.objective = Objective::safe(std::move(set));
      break;
    case ObjectiveKind::Buchi:
      game.objective = Objective::buchi(std::move(set));
      break;
    case ObjectiveKind::CoBuchi:
      game.objective = Objective::cobuchi(std::move(set));
      break;
    default:
      throw std::invalid_argument("turn-based reduction supports Reach/Safe/Buchi/CoBuchi");
  }
  return game;
}

std::vector<int> solve_turn_based(const TurnBasedArena& tb, const TurnBasedObjective& objective) {
  const int n = tb.size();
  for (int v = 0; v < n; ++v) {
    if (tb.owner[v] != 1 && tb.owner[v] != 2)
      throw std::invalid_argument("vertex owner must be 1 or 2");
    if (tb.succ[v].empty()) throw std::invalid_argument("turn-based vertex without successor");
  }
  std::vector<bool> in_set(n, false);
  for (int v : objective.set) in_set[v] = true;
  const std::vector<bool> all(n, true);

  std::vector<bool> p1_wins(n, false);
  switch (objective.kind) {
    case ObjectiveKind::Reach:
      p1_wins = attractor(tb, 1, in_set, all);
      break;
    case ObjectiveKind::Safe: {
      std::vector<bool> unsafe(n, false);
      for (int v = 0; v < n; ++v) unsafe[v] = !in_set[v];
      const auto p2 = attractor(tb, 2, unsafe, all);
      for (int v = 0; v < n; ++v) p1_wins[v] = !p2[v];
      break;
    }
    case ObjectiveKind::Buchi:
      p1_wins = buchi_region(tb, 1, in_set);
      break;
    case ObjectiveKind::CoBuchi: {
      std::vector<bool> rejecting(n, false);
      for (int v = 0; v < n; ++v) rejecting[v] = !in_set[v];
      const auto p2 = buchi_region(tb, 2, rejecting);
      for (int v = 0; v < n; ++v) p1_wins[v] = !p2[v];
      break;
    }
    default:
      throw std::invalid_argument("turn-based solver supports Reach/Safe/Buchi/CoBuchi");
  }
  std::vector<int> winner(n);
  for (int v = 0; v < n; ++v) winner[v] = p1_wins[v] ? 1 : 2;
  return winner;
}

}  // namespace bgc
