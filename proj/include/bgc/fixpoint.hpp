#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bgc/arena.hpp"
#include "bgc/game.hpp"
#include "bgc/objective.hpp"
#include "bgc/rational.hpp"

namespace bgc {

/// Vertex -> value in [0,1] with the player tag and convergence metadata.
/// horizon < 0 means a limit vector; `boundary` marks vertices pinned to
/// their prescribed boundary value.
template <class S>
struct ThresholdVector {
  int player = 1;
  std::vector<S> values;
  std::vector<char> boundary;
  long horizon = -1;
  S residual{};
  long iterations = 0;

  bool is_limit() const { return horizon < 0; }
};

struct NotConverged : std::runtime_error {
  NotConverged(long iterations, double residual)
      : std::runtime_error("NotConverged(iterations=" + std::to_string(iterations) +
                           ", residual=" + std::to_string(residual) + ")"),
        iterations(iterations),
        residual(residual) {}
  long iterations;
  double residual;
};

template <class S>
struct SolveOptions {
  S eps = ScalarOps<S>::exact ? S(0) : S(1e-9);
  long max_iterations = 1000000;
  std::size_t max_denominator_bits = 8192;  // exact mode cap; overflow -> DenominatorOverflow
  long max_k = 10000;                       // Buchi outer-loop cap
};

/// One threshold-update evaluation at v: v+ / v- are the successors
/// attaining max / min of f (ties to the lowest index), then
/// clamp(((1-tau) f(v-) + f(v+)) / ([f(v+) - f(v-) - 1] tau + 2) * (1+R1+R2) - R_i).
template <class S>
S apply_operator_at(const Arena& arena, const Mechanism& mech, const std::vector<S>& f, int player,
                    int v, int* v_plus = nullptr, int* v_minus = nullptr) {
  const auto& succ = arena.successors(v);
  int vp = succ[0], vm = succ[0];
  for (int u : succ) {
    if (f[u] > f[vp]) vp = u;
    if (f[u] < f[vm]) vm = u;
  }
  if (v_plus) *v_plus = vp;
  if (v_minus) *v_minus = vm;
  const S tau = ScalarOps<S>::from(mech.effective_tau());
  const S factor = ScalarOps<S>::from(arena.charge_factor(v));
  const S ri = ScalarOps<S>::from(player == 1 ? arena.charge1(v) : arena.charge2(v));
  // Denominator is >= 2 - tau >= 1 for f-values in [0,1].
  const S num = (S(1) - tau) * f[vm] + f[vp];
  const S den = (f[vp] - f[vm] - S(1)) * tau + S(2);
  return clamp01<S>(num / den * factor - ri);
}

/// Full synchronous sweep: boundary vertices copied, the rest updated.
template <class S>
ThresholdVector<S> apply_operator(const ThresholdVector<S>& f, const Arena& arena,
                                  const Mechanism& mech, int player) {
  ThresholdVector<S> g = f;
  for (int v = 0; v < arena.size(); ++v)
    if (!f.boundary[v]) g.values[v] = apply_operator_at(arena, mech, f.values, player, v);
  return g;
}

/// Boundary prescription for a solve: which vertices are pinned, and to what.
template <class S>
struct BoundarySpec {
  std::vector<char> pinned;
  std::vector<S> value;

  static BoundarySpec from_objective(const Arena& arena, const Objective& normalized, int player) {
    BoundarySpec b;
    b.pinned.assign(arena.size(), 0);
    b.value.assign(arena.size(), S(0));
    for (int v : normalized.set) b.pinned[v] = 1;
    for (int v : normalized.set) {
      S fr(0);
      if (normalized.kind == ObjectiveKind::FrugalReach) {
        auto it = normalized.frugal.find(v);
        if (it != normalized.frugal.end()) fr = ScalarOps<S>::from(it->second);
      }
      b.value[v] = player == 1 ? fr : S(1) - fr;
    }
    return b;
  }
};

namespace detail {

template <class S>
void check_denominators(const std::vector<S>& values, std::size_t max_bits) {
  if constexpr (ScalarOps<S>::exact) {
    for (const S& x : values) {
      std::size_t bits = ScalarOps<S>::denominator_bits(x);
      if (bits > max_bits) throw DenominatorOverflow(max_bits);
    }
  }
}

/// Kleene iteration to the extremal fixed point. Player 1 descends from
/// the all-1-off-boundary start (greatest fixed point); Player 2 ascends
/// from all-0 (least). Exact mode needs a stabilization witness (two
/// identical consecutive sweeps); approximate mode stops when both the
/// step change and the operator residual fall below eps.
template <class S>
ThresholdVector<S> iterate_to_limit(const Arena& arena, const Mechanism& mech,
                                    const BoundarySpec<S>& boundary, int player,
                                    const SolveOptions<S>& opt,
                                    std::vector<S>* residual_trace = nullptr) {
  ThresholdVector<S> f;
  f.player = player;
  f.boundary = boundary.pinned;
  f.values.resize(arena.size());
  const S start = player == 1 ? S(1) : S(0);
  for (int v = 0; v < arena.size(); ++v) f.values[v] = boundary.pinned[v] ? boundary.value[v] : start;

  S prev_step{};
  bool have_prev_step = false;
  for (long it = 1; it <= opt.max_iterations; ++it) {
    ThresholdVector<S> g = apply_operator(f, arena, mech, player);
    S step(0);
    for (int v = 0; v < arena.size(); ++v) {
      S d = ScalarOps<S>::abs(g.values[v] - f.values[v]);
      if (d > step) step = d;
    }
    if (residual_trace) residual_trace->push_back(step);
    check_denominators(g.values, opt.max_denominator_bits);
    f = std::move(g);
    f.iterations = it;
    if constexpr (ScalarOps<S>::exact) {
      if (step == S(0)) {
        f.residual = S(0);
        return f;
      }
    } else {
      // Step-change alone can stall near clamps; require the operator
      // residual (= next step in a Jacobi sweep) to be small as well.
      if (have_prev_step && prev_step < opt.eps && step < opt.eps) {
        f.residual = step;
        return f;
      }
      prev_step = step;
      have_prev_step = true;
    }
  }
  S final_residual(0);
  {
    ThresholdVector<S> g = apply_operator(f, arena, mech, player);
    for (int v = 0; v < arena.size(); ++v) {
      S d = ScalarOps<S>::abs(g.values[v] - f.values[v]);
      if (d > final_residual) final_residual = d;
    }
  }
  throw NotConverged(opt.max_iterations, ScalarOps<S>::to_double(final_residual));
}

}  // namespace detail

/// Finite-horizon thresholds: t applications of the update operator from
/// the base case (reach player: boundary off T is 1 at t=0, safety player 0).
/// Accepts BoundedReach(T, t) and FrugalReach with an explicit horizon.
template <class S>
ThresholdVector<S> bounded_threshold(const Arena& arena, const Mechanism& mech,
                                     const Objective& objective, int player, long horizon) {
  Objective norm = objective.normalized(arena);
  if (norm.kind != ObjectiveKind::Reach && norm.kind != ObjectiveKind::FrugalReach &&
      norm.kind != ObjectiveKind::BoundedReach)
    throw std::invalid_argument("bounded_threshold: objective must be reachability-like");
  auto boundary = BoundarySpec<S>::from_objective(arena, norm, player);
  ThresholdVector<S> f;
  f.player = player;
  f.boundary = boundary.pinned;
  f.horizon = 0;
  f.values.resize(arena.size());
  const S start = player == 1 ? S(1) : S(0);
  for (int v = 0; v < arena.size(); ++v) f.values[v] = boundary.pinned[v] ? boundary.value[v] : start;
  for (long t = 1; t <= horizon; ++t) {
    f = apply_operator(f, arena, mech, player);
    f.horizon = t;
  }
  f.iterations = horizon;
  return f;
}

/// All levels 0..horizon (the Fig.-5-style table, one vector per row).
template <class S>
std::vector<ThresholdVector<S>> bounded_table(const Arena& arena, const Mechanism& mech,
                                              const Objective& objective, int player, long horizon) {
  std::vector<ThresholdVector<S>> rows;
  rows.push_back(bounded_threshold<S>(arena, mech, objective, player, 0));
  for (long t = 1; t <= horizon; ++t) {
    ThresholdVector<S> next = apply_operator(rows.back(), arena, mech, player);
    next.horizon = t;
    rows.push_back(std::move(next));
  }
  return rows;
}

/// Limit thresholds for Reach / Safe / FrugalReach. Safety is handled by
/// normalization to the complement reach set; the player argument selects
/// the greatest-fixed-point (player 1) or least-fixed-point (player 2) side.
template <class S>
ThresholdVector<S> limit_threshold(const Arena& arena, const Mechanism& mech,
                                   const Objective& objective, int player,
                                   const SolveOptions<S>& opt = {},
                                   std::vector<S>* residual_trace = nullptr) {
  Objective norm = objective.normalized(arena);
  if (norm.kind != ObjectiveKind::Reach && norm.kind != ObjectiveKind::FrugalReach)
    throw std::invalid_argument("limit_threshold: objective must be Reach/Safe/FrugalReach");
  auto boundary = BoundarySpec<S>::from_objective(arena, norm, player);
  return detail::iterate_to_limit(arena, mech, boundary, player, opt, residual_trace);
}

template <class S>
struct FixedPointCertificate {
  S max_residual{};        // max |Av(f)(v) - f(v)| off boundary
  S complementarity_gap{}; // max |f1(v) + f2(v) - 1| against the dual solve
};

/// Re-applies the operator once and re-solves the dual player's vector;
/// the caller compares the certificate against its tolerance.
template <class S>
FixedPointCertificate<S> certify_fixed_point(const ThresholdVector<S>& f, const Arena& arena,
                                             const Mechanism& mech, const Objective& objective,
                                             const SolveOptions<S>& opt = {}) {
  if (!f.is_limit()) throw std::invalid_argument("certify_fixed_point: vector must claim horizon limit");
  FixedPointCertificate<S> cert;
  ThresholdVector<S> g = apply_operator(f, arena, mech, f.player);
  for (int v = 0; v < arena.size(); ++v) {
    S d = ScalarOps<S>::abs(g.values[v] - f.values[v]);
    if (d > cert.max_residual) cert.max_residual = d;
  }
  const int dual = f.player == 1 ? 2 : 1;
  ThresholdVector<S> fd = limit_threshold<S>(arena, mech, objective, dual, opt);
  for (int v = 0; v < arena.size(); ++v) {
    S d = ScalarOps<S>::abs(f.values[v] + fd.values[v] - S(1));
    if (d > cert.complementarity_gap) cert.complementarity_gap = d;
  }
  return cert;
}

}  // namespace bgc
