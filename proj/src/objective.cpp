#include "bgc/objective.hpp"

#include <algorithm>

namespace bgc {

Objective Objective::reach(std::vector<int> t) {
  return {ObjectiveKind::Reach, std::move(t), {}, 0};
}
Objective Objective::safe(std::vector<int> s) {
  return {ObjectiveKind::Safe, std::move(s), {}, 0};
}
Objective Objective::buchi(std::vector<int> b) {
  return {ObjectiveKind::Buchi, std::move(b), {}, 0};
}
Objective Objective::cobuchi(std::vector<int> c) {
  return {ObjectiveKind::CoBuchi, std::move(c), {}, 0};
}
Objective Objective::frugal_reach(std::vector<int> t, std::map<int, Rational> fr) {
  return {ObjectiveKind::FrugalReach, std::move(t), std::move(fr), 0};
}
Objective Objective::bounded_reach(std::vector<int> t, long horizon) {
  return {ObjectiveKind::BoundedReach, std::move(t), {}, horizon};
}
Objective Objective::bounded_buchi(std::vector<int> b, long visits) {
  return {ObjectiveKind::BoundedBuchi, std::move(b), {}, visits};
}

bool Objective::contains(int v) const {
  return std::find(set.begin(), set.end(), v) != set.end();
}

Objective Objective::normalized(const Arena& arena) const {
  switch (kind) {
    case ObjectiveKind::Safe:
      return Objective::reach(complement_set(arena, set));
    case ObjectiveKind::CoBuchi:
      return Objective::buchi(complement_set(arena, set));
    default:
      return *this;
  }
}

std::vector<int> complement_set(const Arena& arena, const std::vector<int>& set) {
  std::vector<bool> in(arena.size(), false);
  for (int v : set) in[v] = true;
  std::vector<int> out;
  for (int v = 0; v < arena.size(); ++v)
    if (!in[v]) out.push_back(v);
  return out;
}

}  // namespace bgc
