#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <string>

#include "bgc/arena.hpp"
#include "bgc/objective.hpp"
#include "bgc/rational.hpp"

namespace bgc {

enum class Bidding { Richman, Poorman, Taxman };

/// Budget-update semantics. Richman = taxman with tau 0, poorman = tau 1.
struct Mechanism {
  Bidding kind = Bidding::Richman;
  Rational tau = 0;

  static Mechanism richman() { return {Bidding::Richman, Rational(0)}; }
  static Mechanism poorman() { return {Bidding::Poorman, Rational(1)}; }
  static Mechanism taxman(Rational t) {
    t.canonicalize();  // GMP comparisons require canonical form
    return {Bidding::Taxman, std::move(t)};
  }

  /// Tax rate actually applied: 0 for Richman, 1 for poorman.
  const Rational& effective_tau() const { return tau; }
};

enum class Phase { PreCharge, PostCharge };

/// Token position plus Player 1's normalized budget. Player 2 implicitly
/// holds 1 - budget1.
template <class S>
struct Configuration {
  int vertex = 0;
  S budget1{};
  Phase phase = Phase::PreCharge;
};

template <class S>
struct Action {
  S bid{};
  int target = 0;
};

struct GameError : std::runtime_error {
  enum Code { BidExceedsBudget, IllegalMove };
  GameError(Code c, int player)
      : std::runtime_error(std::string(c == BidExceedsBudget ? "BidExceedsBudget" : "IllegalMove") +
                           "(player " + std::to_string(player) + ")"),
        code(c),
        player(player) {}
  Code code;
  int player;
};

/// B1' = (B1 + R1(v)) / (1 + R1(v) + R2(v)); total on valid inputs.
template <class S>
Configuration<S> charge_and_normalize(const Configuration<S>& c, const Arena& arena) {
  if (c.phase != Phase::PreCharge) throw std::logic_error("charge_and_normalize: expected pre-charge");
  const S r1 = ScalarOps<S>::from(arena.charge1(c.vertex));
  const S factor = ScalarOps<S>::from(arena.charge_factor(c.vertex));
  return {c.vertex, (c.budget1 + r1) / factor, Phase::PostCharge};
}

template <class S>
struct BidOutcome {
  Configuration<S> next;  // pre-charge at the chosen successor
  int winner = 1;         // who won the bidding
};

/// Resolves one simultaneous bidding round. Ties go to Player 1 by
/// default (configurable; the result does not depend on the choice).
template <class S>
BidOutcome<S> resolve_bids(const Configuration<S>& c, const Action<S>& a1, const Action<S>& a2,
                           const Mechanism& mech, const Arena& arena, bool ties_to_p1 = true) {
  if (c.phase != Phase::PostCharge) throw std::logic_error("resolve_bids: expected post-charge");
  const S b2_budget = S(1) - c.budget1;
  if (a1.bid < S(0) || a1.bid > c.budget1) throw GameError(GameError::BidExceedsBudget, 1);
  if (a2.bid < S(0) || a2.bid > b2_budget) throw GameError(GameError::BidExceedsBudget, 2);
  const auto& succ = arena.successors(c.vertex);
  if (std::find(succ.begin(), succ.end(), a1.target) == succ.end())
    throw GameError(GameError::IllegalMove, 1);
  if (std::find(succ.begin(), succ.end(), a2.target) == succ.end())
    throw GameError(GameError::IllegalMove, 2);

  const S tau = ScalarOps<S>::from(mech.effective_tau());
  const bool p1_wins = (a1.bid > a2.bid) || (a1.bid == a2.bid && ties_to_p1);
  // Taxman with tau 0 / 1 reproduces Richman / poorman bit-for-bit.
  S budget1;
  int target;
  if (p1_wins) {
    budget1 = (c.budget1 - a1.bid) / (S(1) - tau * a1.bid);
    target = a1.target;
  } else {
    budget1 = (c.budget1 + (S(1) - tau) * a2.bid) / (S(1) - tau * a2.bid);
    target = a2.target;
  }
  return {Configuration<S>{target, budget1, Phase::PreCharge}, p1_wins ? 1 : 2};
}

enum class PrefixVerdict { Player1Won, Player2Won, Undecided };

/// Decidable prefix evaluation for Reach/Safe/BoundedReach/BoundedBuchi.
/// Plain Buchi/CoBuchi cannot be decided on a finite prefix; the
/// invariant harness certifies those instead.
PrefixVerdict prefix_winner(std::span<const int> path, const Objective& objective);

}  // namespace bgc
