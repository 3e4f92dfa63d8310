#pragma once

#include <vector>

#include "bgc/fixpoint.hpp"

namespace bgc {

/// Level-k state of the nested fixed point: thresholds for "visit B at
/// least k times" plus a count of inner frugal-reachability solves.
template <class S>
struct BuchiLevel {
  long k = 0;
  ThresholdVector<S> g;
  long inner_solves = 0;
};

namespace detail {

/// Advances the level vector: B-values get one operator application to
/// the previous level (k <= 1: the trivial boundary), off-B values come
/// from a frugal-reachability limit solve with fr = this level's B-values.
template <class S>
BuchiLevel<S> next_buchi_level(const Arena& arena, const Mechanism& mech,
                               const std::vector<int>& b_set, const BuchiLevel<S>& prev, int player,
                               const SolveOptions<S>& opt) {
  BuchiLevel<S> level;
  level.k = prev.k + 1;
  std::vector<char> in_b(arena.size(), 0);
  for (int v : b_set) in_b[v] = 1;

  BoundarySpec<S> boundary;
  boundary.pinned = in_b;
  boundary.value.assign(arena.size(), S(0));
  for (int v : b_set)
    boundary.value[v] = level.k <= 1 ? (player == 1 ? S(0) : S(1))
                                     : apply_operator_at(arena, mech, prev.g.values, player, v);

  level.g = iterate_to_limit(arena, mech, boundary, player, opt);
  level.g.horizon = level.k;
  level.inner_solves = prev.inner_solves + 1;
  return level;
}

template <class S>
BuchiLevel<S> buchi_level_zero(const Arena& arena, int player) {
  BuchiLevel<S> level;
  level.k = 0;
  level.g.player = player;
  level.g.horizon = 0;
  level.g.values.assign(arena.size(), player == 1 ? S(0) : S(1));
  level.g.boundary.assign(arena.size(), 0);
  return level;
}

}  // namespace detail

/// Thresholds for visiting B at least k times (player 1) / fewer than k
/// times (player 2).
template <class S>
ThresholdVector<S> bounded_buchi_threshold(const Arena& arena, const Mechanism& mech,
                                           const std::vector<int>& b_set, long k, int player,
                                           const SolveOptions<S>& opt = {}) {
  if (k >= 1 && b_set.empty()) throw std::invalid_argument("bounded_buchi_threshold: empty B with k >= 1");
  BuchiLevel<S> level = detail::buchi_level_zero<S>(arena, player);
  for (long i = 1; i <= k; ++i) level = detail::next_buchi_level(arena, mech, b_set, level, player, opt);
  return level.g;
}

/// Limit Buchi thresholds: iterates levels until the B-restricted values
/// stabilize (off-B values are a function of the B-restriction), then the
/// final level's off-B frugal solve already carries the limit. Empty B is
/// unsatisfiable: all-1 for player 1, all-0 for player 2.
template <class S>
ThresholdVector<S> buchi_threshold(const Arena& arena, const Mechanism& mech,
                                   const std::vector<int>& b_set, int player,
                                   const SolveOptions<S>& opt = {}) {
  if (b_set.empty()) {
    ThresholdVector<S> f;
    f.player = player;
    f.values.assign(arena.size(), player == 1 ? S(1) : S(0));
    f.boundary.assign(arena.size(), 0);
    return f;
  }
  BuchiLevel<S> level = detail::buchi_level_zero<S>(arena, player);
  for (long k = 1; k <= opt.max_k; ++k) {
    BuchiLevel<S> next = detail::next_buchi_level(arena, mech, b_set, level, player, opt);
    S change(0);
    for (int v : b_set) {
      S d = ScalarOps<S>::abs(next.g.values[v] - level.g.values[v]);
      if (d > change) change = d;
    }
    bool stable = false;
    if constexpr (ScalarOps<S>::exact)
      stable = k > 1 && change == S(0);
    else
      stable = k > 1 && change < opt.eps;
    level = std::move(next);
    if (stable) {
      level.g.horizon = -1;
      level.g.residual = change;
      level.g.iterations = k;
      return level.g;
    }
  }
  throw NotConverged(opt.max_k, ScalarOps<S>::to_double(S(0)));
}

/// Co-Buchi thresholds: CoBuchi(C) is Buchi(V\C) with the player roles
/// complemented (the co-Buchi protagonist is the Buchi antagonist).
template <class S>
ThresholdVector<S> cobuchi_threshold(const Arena& arena, const Mechanism& mech,
                                     const std::vector<int>& c_set, int player,
                                     const SolveOptions<S>& opt = {}) {
  std::vector<int> b = complement_set(arena, c_set);
  ThresholdVector<S> f = buchi_threshold(arena, mech, b, player == 1 ? 2 : 1, opt);
  for (S& x : f.values) x = S(1) - x;
  f.player = player;
  return f;
}

}  // namespace bgc
