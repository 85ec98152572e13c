// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "matchlab/model.hpp"

namespace matchlab {

// All predicates judge `mu` against p.profile, which the caller picks: the
// truncated profile a constrained mechanism saw, or the true one.

bool is_individually_rational(const Problem& p, const Matching& mu);

struct EnvyTriple {
  StudentId envious;
  StudentId envied;
  SchoolId school;

  friend bool operator==(const EnvyTriple&, const EnvyTriple&) = default;
};

/// (i, j, s) with mu(j) = s, s P_i mu(i) and i ahead of j at s, in (i, j) order.
std::vector<EnvyTriple> justified_envy_pairs(const Problem& p, const Matching& mu);

bool is_non_wasteful(const Problem& p, const Matching& mu);

bool is_stable(const Problem& p, const Matching& mu);

}  // namespace matchlab
