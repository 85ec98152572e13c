// SPDX-License-Identifier: Apache-2.0
#include "matchlab/model.hpp"

#include <algorithm>

namespace matchlab {

Preference::Preference(std::initializer_list<std::uint32_t> schools) {
  ranking_.reserve(schools.size());
  for (auto s : schools) ranking_.push_back(SchoolId{s});
}

std::optional<std::size_t> Preference::position(SchoolId s) const noexcept {
  for (std::size_t p = 0; p < ranking_.size(); ++p) {
    if (ranking_[p] == s) return p;
  }
  return std::nullopt;
}

// Listed schools rank 0..len-1, unmatched ranks len, unacceptable len+1.
std::size_t Preference::rank_of(Outcome o) const noexcept {
  if (!o) return ranking_.size();
  auto pos = position(*o);
  return pos ? *pos : ranking_.size() + 1;
}

bool Preference::prefers(Outcome a, Outcome b) const noexcept {
  return rank_of(a) < rank_of(b);
}

std::string Environment::student_label(StudentId i) const {
  if (i.value < student_labels.size()) return student_labels[i.value];
  return std::to_string(i.value + 1);
}

std::string Environment::school_label(SchoolId s) const {
  if (s.value < school_labels.size()) return school_labels[s.value];
  return "s" + std::to_string(s.value + 1);
}

Environment Environment::common(std::size_t n, std::size_t m, std::uint32_t capacity) {
  Environment env;
  env.student_count = n;
  PriorityOrder order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = StudentId{static_cast<std::uint32_t>(i)};
  env.priorities.assign(m, order);
  env.capacities.assign(m, capacity);
  return env;
}

std::size_t Matching::count_at(SchoolId s) const noexcept {
  return static_cast<std::size_t>(
      std::count(assignment_.begin(), assignment_.end(), Outcome{s}));
}

std::vector<StudentId> Matching::students_at(SchoolId s) const {
  std::vector<StudentId> out;
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    if (assignment_[i] == s) out.push_back(StudentId{static_cast<std::uint32_t>(i)});
  }
  return out;
}

Preference truncate(const Preference& pref, std::size_t k) {
  auto r = pref.ranking();
  return Preference(std::vector<SchoolId>(r.begin(), r.begin() + std::min(k, r.size())));
}

PreferenceProfile truncate(const PreferenceProfile& profile, std::size_t k) {
  PreferenceProfile out;
  out.reserve(profile.size());
  for (const auto& p : profile) out.push_back(truncate(p, k));
  return out;
}

ValidationReport validate_environment(const Environment& env) {
  ValidationReport report;
  const std::size_t n = env.student_count;
  const std::size_t m = env.school_count();
  auto& v = report.violations;

  if (n == 0) v.push_back("no students");
  if (m == 0) v.push_back("no schools");
  if (env.priorities.size() != m) {
    v.push_back("priority order count " + std::to_string(env.priorities.size()) +
                " does not match school count " + std::to_string(m));
  }
  for (std::size_t s = 0; s < m; ++s) {
    if (env.capacities[s] < 1) {
      v.push_back("capacity < 1 at school " + env.school_label(SchoolId{static_cast<std::uint32_t>(s)}));
    }
  }
  for (std::size_t s = 0; s < env.priorities.size(); ++s) {
    const auto& order = env.priorities[s];
    std::vector<bool> seen(n, false);
    bool ok = order.size() == n;
    for (auto id : order) {
      if (id.value >= n) {
        v.push_back("student index " + std::to_string(id.value) + " out of range in priority of school " +
                    std::to_string(s));
        ok = false;
      } else if (seen[id.value]) {
        ok = false;
      } else {
        seen[id.value] = true;
      }
    }
    if (!ok) {
      v.push_back("priority not a permutation at school " +
                  env.school_label(SchoolId{static_cast<std::uint32_t>(s)}));
    }
  }
  if (!env.student_labels.empty() && env.student_labels.size() != n) {
    v.push_back("student label count does not match student count");
  }
  if (!env.school_labels.empty() && env.school_labels.size() != m) {
    v.push_back("school label count does not match school count");
  }
  report.paper_assumptions_hold = n > m && m >= 2;
  return report;
}

ValidationReport validate_problem(const Problem& p) {
  ValidationReport report = validate_environment(p.environment);
  auto& v = report.violations;
  const std::size_t m = p.m();
  if (p.profile.size() != p.environment.student_count) {
    v.push_back("profile has " + std::to_string(p.profile.size()) + " preferences for " +
                std::to_string(p.environment.student_count) + " students");
  }
  for (std::size_t i = 0; i < p.profile.size(); ++i) {
    std::vector<bool> seen(m, false);
    const auto label = p.environment.student_label(StudentId{static_cast<std::uint32_t>(i)});
    for (auto s : p.profile[i].ranking()) {
      if (s.value >= m) {
        v.push_back("school index " + std::to_string(s.value) + " out of range in preference of student " +
                    label);
      } else if (seen[s.value]) {
        v.push_back("duplicate school " + p.environment.school_label(s) + " in preference of student " +
                    label);
      } else {
        seen[s.value] = true;
      }
    }
  }
  return report;
}

bool respects_capacities(const Matching& mu, const Environment& env) {
  std::vector<std::size_t> load(env.school_count(), 0);
  for (auto o : mu.assignment()) {
    if (!o) continue;
    if (o->value >= load.size()) return false;
    ++load[o->value];
  }
  for (std::size_t s = 0; s < load.size(); ++s) {
    if (load[s] > env.capacities[s]) return false;
  }
  return true;
}

bool has_common_priority(const Environment& env) {
  return std::adjacent_find(env.priorities.begin(), env.priorities.end(),
                            std::not_equal_to<>{}) == env.priorities.end();
}

std::vector<std::vector<std::uint32_t>> priority_ranks(const Environment& env) {
  std::vector<std::vector<std::uint32_t>> ranks(env.school_count(),
                                                std::vector<std::uint32_t>(env.student_count, 0));
  for (std::size_t s = 0; s < env.priorities.size(); ++s) {
    const auto& order = env.priorities[s];
    for (std::size_t r = 0; r < order.size(); ++r) {
      ranks[s][order[r].value] = static_cast<std::uint32_t>(r);
    }
  }
  return ranks;
}

}  // namespace matchlab
