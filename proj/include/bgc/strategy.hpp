#pragma once

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "bgc/buchi.hpp"
#include "bgc/fixpoint.hpp"
#include "bgc/game.hpp"

namespace bgc {

/// The proofs' bid-and-move rule: bid (f(v+)-f(v-)) / ([f(v+)-f(v-)-1] tau + 2)
/// clipped to the available budget, move to v- (argmin of the acting
/// player's own vector, lowest index on ties).
template <class S>
Action<S> derive_action(const std::vector<S>& f, const Configuration<S>& config,
                        const Mechanism& mech, const Arena& arena, int player) {
  if (config.phase != Phase::PostCharge) throw std::logic_error("derive_action: expected post-charge");
  const auto& succ = arena.successors(config.vertex);
  int vp = succ[0], vm = succ[0];
  for (int u : succ) {
    if (f[u] > f[vp]) vp = u;
    if (f[u] < f[vm]) vm = u;
  }
  const S tau = ScalarOps<S>::from(mech.effective_tau());
  const S spread = f[vp] - f[vm];
  S bid = spread / ((spread - S(1)) * tau + S(2));
  const S budget = player == 1 ? config.budget1 : S(1) - config.budget1;
  if (bid > budget) bid = budget;
  return {bid, vm};
}

/// A bidding strategy; sees the pre-charge and post-charge configuration
/// of the current round. Implementations may keep per-play state (reset
/// between plays) and may draw from the play's RNG.
template <class S>
class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual Action<S> act(const Configuration<S>& pre, const Configuration<S>& post,
                        std::mt19937_64& rng) = 0;
  virtual void reset() {}
  virtual std::string name() const = 0;
};

namespace detail {
/// Uniform draw from [0, 1]; exact mode uses dyadic rationals of 32 bits.
template <class S>
S random_unit(std::mt19937_64& rng) {
  const unsigned long long r = rng() >> 32;
  if constexpr (ScalarOps<S>::exact) {
    Rational q(static_cast<unsigned long>(r), 4294967296UL);
    q.canonicalize();
    return S(q);
  } else
    return static_cast<double>(r) / 4294967296.0;
}
}  // namespace detail

/// Plays derive_action on a fixed (limit) threshold vector.
template <class S>
class ThresholdStrategy : public Strategy<S> {
 public:
  ThresholdStrategy(std::vector<S> vector, Mechanism mech, const Arena& arena, int player)
      : f_(std::move(vector)), mech_(mech), arena_(&arena), player_(player) {}
  Action<S> act(const Configuration<S>&, const Configuration<S>& post, std::mt19937_64&) override {
    return derive_action(f_, post, mech_, *arena_, player_);
  }
  std::string name() const override { return "threshold"; }

 private:
  std::vector<S> f_;
  Mechanism mech_;
  const Arena* arena_;
  int player_;
};

/// Reachability winning strategy for Player 1: from pre-charge budget B1
/// pick the smallest level t with B1 > f(v, t), bid and move with the
/// level t-1 vector. The limit vector alone does not bound time-to-target.
template <class S>
class LevelIndexedStrategy : public Strategy<S> {
 public:
  /// levels[t] is the horizon-t vector (level 0 = base case).
  LevelIndexedStrategy(std::vector<std::vector<S>> levels, Mechanism mech, const Arena& arena,
                       int player)
      : levels_(std::move(levels)), mech_(mech), arena_(&arena), player_(player) {}

  Action<S> act(const Configuration<S>& pre, const Configuration<S>& post,
                std::mt19937_64&) override {
    const S budget = player_ == 1 ? pre.budget1 : S(1) - pre.budget1;
    std::size_t t = levels_.size() - 1;
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      if (budget > levels_[i][pre.vertex]) {
        t = i;
        break;
      }
    }
    const auto& level = levels_[t > 0 ? t - 1 : 0];
    return derive_action(level, post, mech_, *arena_, player_);
  }
  std::string name() const override { return "level-indexed"; }

  /// Successor the strategy would move to from vertex v at budget b.
  int move_target(int v, const S& budget_pre_charge) {
    Configuration<S> pre{v, player_ == 1 ? budget_pre_charge : S(1) - budget_pre_charge,
                         Phase::PreCharge};
    Configuration<S> post = charge_and_normalize(pre, *arena_);
    std::mt19937_64 rng(0);
    return act(pre, post, rng).target;
  }

 private:
  std::vector<std::vector<S>> levels_;
  Mechanism mech_;
  const Arena* arena_;
  int player_;
};

/// Buchi two-phase strategy: off B plays the frugal-reachability vector,
/// on B plays the operator action on the limit Buchi vector.
template <class S>
class BuchiTwoPhaseStrategy : public Strategy<S> {
 public:
  BuchiTwoPhaseStrategy(std::vector<S> g_star, std::vector<S> off_b, std::vector<char> in_b,
                        Mechanism mech, const Arena& arena, int player)
      : g_star_(std::move(g_star)),
        off_b_(std::move(off_b)),
        in_b_(std::move(in_b)),
        mech_(mech),
        arena_(&arena),
        player_(player) {}
  Action<S> act(const Configuration<S>&, const Configuration<S>& post, std::mt19937_64&) override {
    const auto& f = in_b_[post.vertex] ? g_star_ : off_b_;
    return derive_action(f, post, mech_, *arena_, player_);
  }
  std::string name() const override { return "buchi-two-phase"; }

 private:
  std::vector<S> g_star_, off_b_;
  std::vector<char> in_b_;
  Mechanism mech_;
  const Arena* arena_;
  int player_;
};

/// Adversaries for invariant certification.
template <class S>
class UniformRandomStrategy : public Strategy<S> {
 public:
  UniformRandomStrategy(const Arena& arena, int player) : arena_(&arena), player_(player) {}
  Action<S> act(const Configuration<S>&, const Configuration<S>& post,
                std::mt19937_64& rng) override {
    const S budget = player_ == 1 ? post.budget1 : S(1) - post.budget1;
    const auto& succ = arena_->successors(post.vertex);
    return {budget * detail::random_unit<S>(rng),
            succ[rng() % succ.size()]};
  }
  std::string name() const override { return "uniform-random"; }

 private:
  const Arena* arena_;
  int player_;
};

template <class S>
class AllInStrategy : public Strategy<S> {
 public:
  AllInStrategy(const Arena& arena, int player) : arena_(&arena), player_(player) {}
  Action<S> act(const Configuration<S>&, const Configuration<S>& post,
                std::mt19937_64& rng) override {
    const S budget = player_ == 1 ? post.budget1 : S(1) - post.budget1;
    const auto& succ = arena_->successors(post.vertex);
    return {budget, succ[rng() % succ.size()]};
  }
  std::string name() const override { return "all-in"; }

 private:
  const Arena* arena_;
  int player_;
};

/// Plays the certified player's own threshold-bid formula from that
/// player's vector, moving to the target hardest for them (v+ of f).
template <class S>
class CopycatStrategy : public Strategy<S> {
 public:
  CopycatStrategy(std::vector<S> opponent_vector, Mechanism mech, const Arena& arena, int player)
      : f_(std::move(opponent_vector)), mech_(mech), arena_(&arena), player_(player) {}
  Action<S> act(const Configuration<S>&, const Configuration<S>& post, std::mt19937_64&) override {
    Action<S> a = derive_action(f_, post, mech_, *arena_, player_);
    const auto& succ = arena_->successors(post.vertex);
    int vp = succ[0];
    for (int u : succ)
      if (f_[u] > f_[vp]) vp = u;
    a.target = vp;
    return a;
  }
  std::string name() const override { return "copycat-threshold"; }

 private:
  std::vector<S> f_;
  Mechanism mech_;
  const Arena* arena_;
  int player_;
};

/// Bids just below the opponent's threshold bid; the hardest natural
/// opponent for invariant testing.
template <class S>
class EpsUndercutStrategy : public Strategy<S> {
 public:
  EpsUndercutStrategy(std::vector<S> opponent_vector, S eps, Mechanism mech, const Arena& arena,
                      int player)
      : f_(std::move(opponent_vector)), eps_(std::move(eps)), mech_(mech), arena_(&arena),
        player_(player) {}
  Action<S> act(const Configuration<S>&, const Configuration<S>& post, std::mt19937_64&) override {
    Action<S> threshold_bid = derive_action(f_, post, mech_, *arena_, player_ == 1 ? 2 : 1);
    S bid = threshold_bid.bid - eps_ / S(2);
    if (bid < S(0)) bid = S(0);
    const S budget = player_ == 1 ? post.budget1 : S(1) - post.budget1;
    if (bid > budget) bid = budget;
    const auto& succ = arena_->successors(post.vertex);
    int vp = succ[0];
    for (int u : succ)
      if (f_[u] > f_[vp]) vp = u;
    return {bid, vp};
  }
  std::string name() const override { return "eps-undercut"; }

 private:
  std::vector<S> f_;
  S eps_;
  Mechanism mech_;
  const Arena* arena_;
  int player_;
};

enum class Verdict { P1Win, P2Win, InvariantViolation, Truncated };

template <class S>
struct PlayStep {
  Configuration<S> pre, post;
  Action<S> action1, action2;
  int bid_winner = 1;
};

/// Simulation trace: alternating configurations with both actions and
/// the per-round bid winner.
template <class S>
struct PlayRecord {
  std::vector<PlayStep<S>> steps;
  std::vector<int> path;
  Verdict verdict = Verdict::Truncated;
  long violation_step = -1;
  std::string error;
};

/// Runs one play; deterministic given the seed. Illegal actions are
/// attributed to the offending strategy via Verdict::InvariantViolation.
template <class S>
PlayRecord<S> simulate(const Arena& arena, const Mechanism& mech, const Objective& objective,
                       Strategy<S>& s1, Strategy<S>& s2, Configuration<S> initial, long step_limit,
                       std::uint64_t seed, bool ties_to_p1 = true) {
  PlayRecord<S> record;
  std::mt19937_64 rng(seed);
  s1.reset();
  s2.reset();
  Configuration<S> pre = initial;
  record.path.push_back(pre.vertex);
  const bool prefix_decidable = objective.kind != ObjectiveKind::Buchi &&
                                objective.kind != ObjectiveKind::CoBuchi;
  if (prefix_decidable) {
    PrefixVerdict v = prefix_winner(record.path, objective);
    if (v == PrefixVerdict::Player1Won) { record.verdict = Verdict::P1Win; return record; }
    if (v == PrefixVerdict::Player2Won) { record.verdict = Verdict::P2Win; return record; }
  }
  for (long step = 0; step < step_limit; ++step) {
    Configuration<S> post = charge_and_normalize(pre, arena);
    Action<S> a1 = s1.act(pre, post, rng);
    Action<S> a2 = s2.act(pre, post, rng);
    BidOutcome<S> outcome;
    try {
      outcome = resolve_bids(post, a1, a2, mech, arena, ties_to_p1);
    } catch (const GameError& e) {
      record.verdict = Verdict::InvariantViolation;
      record.violation_step = step;
      record.error = e.what();
      return record;
    }
    record.steps.push_back({pre, post, a1, a2, outcome.winner});
    pre = outcome.next;
    record.path.push_back(pre.vertex);
    if (prefix_decidable) {
      PrefixVerdict v = prefix_winner(record.path, objective);
      if (v == PrefixVerdict::Player1Won) { record.verdict = Verdict::P1Win; return record; }
      if (v == PrefixVerdict::Player2Won) { record.verdict = Verdict::P2Win; return record; }
    }
  }
  record.verdict = Verdict::Truncated;
  return record;
}

struct InvariantViolationInfo {
  std::string adversary;
  long trial = 0;
  long step = 0;
  int vertex = 0;
  double budget = 0, required = 0;
};

struct CertificationReport {
  long trials = 0;
  long steps_checked = 0;
  std::vector<InvariantViolationInfo> violations;
  bool entered_boundary = false;  // any trial visited a boundary vertex of the vector
};

/// Builds the certified player's strategy for f: limit vectors on the
/// least-fixed-point side play the vector directly; the reachability side
/// is level-indexed (the induction step of the soundness proofs).
template <class S>
std::unique_ptr<Strategy<S>> threshold_strategy_for(const Arena& arena, const Mechanism& mech,
                                                    const Objective& objective,
                                                    const ThresholdVector<S>& f, int player,
                                                    long max_levels = 512) {
  Objective norm = objective.normalized(arena);
  if (player == 2) return std::make_unique<ThresholdStrategy<S>>(f.values, mech, arena, player);
  std::vector<std::vector<S>> levels;
  auto table = bounded_table<S>(arena, mech, norm, player, max_levels);
  levels.reserve(table.size());
  for (auto& row : table) levels.push_back(std::move(row.values));
  return std::make_unique<LevelIndexedStrategy<S>>(std::move(levels), mech, arena, player);
}

/// Runs seeded trials of the certified player's derived strategy against
/// one adversary and asserts the proofs' step invariant: after every
/// resolved step into v', the acting player's budget exceeds f(v').
template <class S>
void certify_against(const Arena& arena, const Mechanism& mech, Strategy<S>& certified,
                     Strategy<S>& adversary, const ThresholdVector<S>& f, int player,
                     Configuration<S> initial, long trials, long step_limit, std::uint64_t seed,
                     CertificationReport& report) {
  for (long trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(trial + 1)));
    certified.reset();
    adversary.reset();
    Configuration<S> pre = initial;
    for (long step = 0; step < step_limit; ++step) {
      Configuration<S> post = charge_and_normalize(pre, arena);
      Action<S> a1, a2;
      if (player == 1) {
        a1 = certified.act(pre, post, rng);
        a2 = adversary.act(pre, post, rng);
      } else {
        a1 = adversary.act(pre, post, rng);
        a2 = certified.act(pre, post, rng);
      }
      BidOutcome<S> outcome = resolve_bids(post, a1, a2, mech, arena);
      pre = outcome.next;
      ++report.steps_checked;
      if (f.boundary[pre.vertex]) {
        report.entered_boundary = true;
        break;  // boundary reached: the bounded objective is decided
      }
      const S budget = player == 1 ? pre.budget1 : S(1) - pre.budget1;
      if (!(budget > f.values[pre.vertex]))
        report.violations.push_back({adversary.name(), trial, step, pre.vertex,
                                     ScalarOps<S>::to_double(budget),
                                     ScalarOps<S>::to_double(f.values[pre.vertex])});
    }
    ++report.trials;
  }
}

/// Full adversary suite (uniform-random, all-in, copycat-threshold,
/// eps-undercut) from budget f(v) + eps.
template <class S>
CertificationReport certify_invariant(const Arena& arena, const Mechanism& mech,
                                      const Objective& objective, const ThresholdVector<S>& f,
                                      int player, int start_vertex, const S& eps, long trials,
                                      long step_limit, std::uint64_t seed) {
  CertificationReport report;
  S budget = f.values[start_vertex] + eps;
  if (budget > S(1)) budget = S(1);
  Configuration<S> initial{start_vertex, player == 1 ? budget : S(1) - budget, Phase::PreCharge};
  auto certified = threshold_strategy_for(arena, mech, objective, f, player);
  const int adv_player = player == 1 ? 2 : 1;

  UniformRandomStrategy<S> uniform(arena, adv_player);
  AllInStrategy<S> all_in(arena, adv_player);
  CopycatStrategy<S> copycat(f.values, mech, arena, adv_player);
  EpsUndercutStrategy<S> undercut(f.values, eps, mech, arena, adv_player);
  Strategy<S>* suite[] = {&uniform, &all_in, &copycat, &undercut};
  std::uint64_t salt = 1;
  for (Strategy<S>* adversary : suite)
    certify_against(arena, mech, *certified, *adversary, f, player, initial, trials, step_limit,
                    seed + salt++, report);
  return report;
}

}  // namespace bgc
