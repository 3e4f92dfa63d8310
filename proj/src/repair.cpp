#include "bgc/repair.hpp"

#include <functional>

#include "bgc/buchi.hpp"
#include "bgc/fixpoint.hpp"

namespace bgc {
namespace {

Rational threshold_at(const Arena& arena, const RepairInstance& instance) {
  SolveOptions<Rational> opt;
  switch (instance.objective.kind) {
    case ObjectiveKind::Reach:
    case ObjectiveKind::Safe:
    case ObjectiveKind::FrugalReach:
      return limit_threshold<Rational>(arena, instance.mech, instance.objective, 1, opt)
          .values[instance.vertex];
    case ObjectiveKind::Buchi:
      return buchi_threshold<Rational>(arena, instance.mech, instance.objective.set, 1, opt)
          .values[instance.vertex];
    case ObjectiveKind::CoBuchi:
      return cobuchi_threshold<Rational>(arena, instance.mech, instance.objective.set, 1, opt)
          .values[instance.vertex];
    default:
      throw InadmissibleRepair("repair objective must be Reach/Safe/Buchi/CoBuchi/FrugalReach");
  }
}

}  // namespace

Rational verify_repair(const RepairInstance& instance, const std::map<int, Rational>& delta) {
  Rational total(0);
  for (const auto& [v, d] : delta) {
    if (v < 0 || v >= instance.arena.size())
      throw InadmissibleRepair("repair touches an unknown vertex index");
    if (d < 0) throw InadmissibleRepair("repair charge additions must be non-negative");
    total += d;
  }
  if (total > instance.budget) throw InadmissibleRepair("repair exceeds the charge budget");
  return threshold_at(instance.arena.with_added_charges1(delta), instance);
}

RepairResult repair_search(const RepairInstance& instance, const Rational& grid, int support,
                           long candidate_cap) {
  if (grid <= 0) throw InadmissibleRepair("grid step must be positive");
  if (support < 0) throw InadmissibleRepair("support size must be non-negative");
  const int n = instance.arena.size();
  Rational ratio = instance.budget / grid;
  ratio.canonicalize();
  const long max_units = mpz_class(ratio.get_num() / ratio.get_den()).get_si();

  RepairResult best;
  best.grid = grid;
  best.achieved = Rational(2);  // above any real threshold

  std::vector<long> units(n, 0);
  std::vector<std::vector<long>> failed;  // maximal known-failing allocations

  auto dominated_by_failure = [&](const std::vector<long>& cand) {
    for (const auto& f : failed) {
      bool below = true;
      for (int v = 0; v < n; ++v)
        if (cand[v] > f[v]) {
          below = false;
          break;
        }
      if (below) return true;
    }
    return false;
  };

  bool capped = false;
  std::function<void(int, long, int)> enumerate = [&](int v, long remaining, int used) {
    if (best.success || capped) return;
    if (v == n) {
      ++best.candidates_enumerated;
      if (best.candidates_enumerated > candidate_cap) {
        capped = true;
        return;
      }
      if (dominated_by_failure(units)) return;
      std::map<int, Rational> delta;
      for (int u = 0; u < n; ++u)
        if (units[u] > 0) delta[u] = grid * units[u];
      ++best.candidates_evaluated;
      const Rational achieved = verify_repair(instance, delta);
      if (achieved < best.achieved) {
        best.achieved = achieved;
        best.delta = delta;
      }
      if (achieved <= instance.target) {
        best.success = true;
        best.achieved = achieved;
        best.delta = delta;
      } else {
        failed.push_back(units);
      }
      return;
    }
    for (long m = 0; m <= remaining; ++m) {
      if (m > 0 && used >= support) break;
      units[v] = m;
      enumerate(v + 1, remaining - m, used + (m > 0 ? 1 : 0));
      units[v] = 0;
      if (best.success || capped) return;
    }
  };
  enumerate(0, max_units, 0);
  if (capped && !best.success)
    throw SearchSpaceTooLarge("repair search exceeded the candidate cap of " +
                              std::to_string(candidate_cap));

  if (best.candidates_evaluated > 0 && best.achieved <= Rational(1)) {
    const Rational check = verify_repair(instance, best.delta);
    best.verified = check == best.achieved && (!best.success || check <= instance.target);
  }
  return best;
}

}  // namespace bgc
