// SPDX-License-Identifier: Apache-2.0
#include "matchlab/stability.hpp"

namespace matchlab {

bool is_individually_rational(const Problem& p, const Matching& mu) {
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto o = mu.assignment()[i];
    if (o && !p.profile[i].acceptable(*o)) return false;
  }
  return true;
}

std::vector<EnvyTriple> justified_envy_pairs(const Problem& p, const Matching& mu) {
  const auto ranks = priority_ranks(p.environment);
  std::vector<EnvyTriple> out;
  for (std::uint32_t i = 0; i < mu.size(); ++i) {
    const auto& pref = p.profile[i];
    for (std::uint32_t j = 0; j < mu.size(); ++j) {
      const auto s = mu[StudentId{j}];
      if (i == j || !s) continue;
      if (pref.prefers(s, mu[StudentId{i}]) && ranks[s->value][i] < ranks[s->value][j]) {
        out.push_back({StudentId{i}, StudentId{j}, *s});
      }
    }
  }
  return out;
}

bool is_non_wasteful(const Problem& p, const Matching& mu) {
  const auto& caps = p.environment.capacities;
  for (std::uint32_t s = 0; s < caps.size(); ++s) {
    const SchoolId school{s};
    if (mu.count_at(school) >= caps[s]) continue;
    for (std::uint32_t i = 0; i < mu.size(); ++i) {
      if (p.profile[i].prefers(school, mu[StudentId{i}])) return false;
    }
  }
  return true;
}

bool is_stable(const Problem& p, const Matching& mu) {
  return is_individually_rational(p, mu) && justified_envy_pairs(p, mu).empty() && is_non_wasteful(p, mu);
}

}  // namespace matchlab
