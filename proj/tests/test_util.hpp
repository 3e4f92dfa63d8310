#pragma once

#include <random>
#include <string>

#include "bgc/json_io.hpp"

namespace bgc::test {

inline std::string fixture(const std::string& name) {
  return std::string(BGC_FIXTURE_DIR) + "/" + name;
}

inline ProblemInput load_fixture(const std::string& name) { return load_problem(fixture(name)); }

inline Rational Q(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/// Random arena generator shared by the property suites: up to max_vertices
/// vertices, every vertex keeps at least one successor, integer charges in
/// [0, max_charge] placed sparsely.
inline Arena random_arena(std::mt19937_64& rng, int max_vertices = 8, long max_charge = 4) {
  const int n = 2 + static_cast<int>(rng() % static_cast<unsigned>(max_vertices - 1));
  RawArena raw;
  for (int v = 0; v < n; ++v) {
    RawVertex rv;
    rv.id = "v" + std::to_string(v);
    const int degree = 1 + static_cast<int>(rng() % 3);
    std::vector<char> used(n, 0);
    for (int e = 0; e < degree; ++e) {
      int w = static_cast<int>(rng() % static_cast<unsigned>(n));
      if (used[w]) continue;
      used[w] = 1;
      rv.succ.push_back("v" + std::to_string(w));
    }
    rv.r1 = rng() % 3 == 0 ? Rational(static_cast<long>(rng() % (max_charge + 1))) : Rational(0);
    rv.r2 = rng() % 3 == 0 ? Rational(static_cast<long>(rng() % (max_charge + 1))) : Rational(0);
    raw.vertices.push_back(std::move(rv));
  }
  return build_arena(raw);
}

inline std::vector<int> random_subset(std::mt19937_64& rng, int n, bool nonempty = true,
                                      bool proper = true) {
  std::vector<int> set;
  for (int v = 0; v < n; ++v)
    if (rng() % 3 == 0) set.push_back(v);
  if (nonempty && set.empty()) set.push_back(static_cast<int>(rng() % static_cast<unsigned>(n)));
  if (proper && static_cast<int>(set.size()) == n) set.pop_back();
  if (nonempty && set.empty()) set.push_back(0);
  return set;
}

inline Mechanism random_mechanism(std::mt19937_64& rng) {
  switch (rng() % 3) {
    case 0:
      return Mechanism::richman();
    case 1:
      return Mechanism::poorman();
    default:
      return Mechanism::taxman(Q(static_cast<long>(rng() % 5), 4));
  }
}

}  // namespace bgc::test
