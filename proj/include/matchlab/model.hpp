// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace matchlab {

/// Dense 0-based index, distinct per tag so students and schools never mix.
template <class Tag>
struct Index {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(Index, Index) = default;
};

using StudentId = Index<struct StudentTag>;
using SchoolId = Index<struct SchoolTag>;

/// A student's placement: a school, or nullopt for unmatched.
using Outcome = std::optional<SchoolId>;

/// Strict ranking of acceptable schools, best first. Unmatched sits right
/// after the last listed school; unlisted schools are unacceptable.
class Preference {
 public:
  Preference() = default;
  explicit Preference(std::vector<SchoolId> ranking) : ranking_(std::move(ranking)) {}
  /// Shorthand from raw school indices.
  Preference(std::initializer_list<std::uint32_t> schools);

  std::span<const SchoolId> ranking() const noexcept { return ranking_; }
  std::size_t size() const noexcept { return ranking_.size(); }
  bool empty() const noexcept { return ranking_.empty(); }
  SchoolId operator[](std::size_t pos) const { return ranking_[pos]; }

  std::optional<std::size_t> position(SchoolId s) const noexcept;
  bool acceptable(SchoolId s) const noexcept { return position(s).has_value(); }

  /// a P b: strict preference. Two unacceptable schools are not ranked.
  bool prefers(Outcome a, Outcome b) const noexcept;
  /// a R b.
  bool weakly_prefers(Outcome a, Outcome b) const noexcept { return !prefers(b, a); }

  friend bool operator==(const Preference&, const Preference&) = default;
  friend auto operator<=>(const Preference&, const Preference&) = default;

 private:
  std::size_t rank_of(Outcome o) const noexcept;

  std::vector<SchoolId> ranking_;
};

using PreferenceProfile = std::vector<Preference>;

/// Every student exactly once, highest priority first.
using PriorityOrder = std::vector<StudentId>;

struct Environment {
  std::size_t student_count = 0;
  std::vector<PriorityOrder> priorities;  // one per school
  std::vector<std::uint32_t> capacities;  // one per school, each >= 1
  // Display names; empty means the defaults "1".."n" and "s1".."sm".
  std::vector<std::string> student_labels;
  std::vector<std::string> school_labels;

  std::size_t school_count() const noexcept { return capacities.size(); }
  std::string student_label(StudentId i) const;
  std::string school_label(SchoolId s) const;

  /// Environment with `n` students, `m` schools, one shared priority
  /// (student 0 highest) and uniform capacity.
  static Environment common(std::size_t n, std::size_t m, std::uint32_t capacity = 1);

  friend bool operator==(const Environment&, const Environment&) = default;
};

struct Problem {
  Environment environment;
  PreferenceProfile profile;

  std::size_t n() const noexcept { return profile.size(); }
  std::size_t m() const noexcept { return environment.school_count(); }

  friend bool operator==(const Problem&, const Problem&) = default;
};

class Matching {
 public:
  Matching() = default;
  explicit Matching(std::size_t n) : assignment_(n) {}
  explicit Matching(std::vector<Outcome> assignment) : assignment_(std::move(assignment)) {}

  std::size_t size() const noexcept { return assignment_.size(); }
  Outcome operator[](StudentId i) const { return assignment_[i.value]; }
  Outcome& operator[](StudentId i) { return assignment_[i.value]; }
  std::span<const Outcome> assignment() const noexcept { return assignment_; }

  std::size_t count_at(SchoolId s) const noexcept;
  std::vector<StudentId> students_at(SchoolId s) const;

  friend bool operator==(const Matching&, const Matching&) = default;

 private:
  std::vector<Outcome> assignment_;
};

/// P_i^k: the first min(k, |P_i|) entries.
Preference truncate(const Preference& pref, std::size_t k);
PreferenceProfile truncate(const PreferenceProfile& profile, std::size_t k);

struct ValidationReport {
  std::vector<std::string> violations;
  /// More students than schools and at least two schools.
  bool paper_assumptions_hold = false;

  bool valid() const noexcept { return violations.empty(); }
};

ValidationReport validate_environment(const Environment& env);
ValidationReport validate_problem(const Problem& p);

/// Shared capacity check used wherever a matching is produced.
bool respects_capacities(const Matching& mu, const Environment& env);

bool has_common_priority(const Environment& env);

/// position[s][i]: rank of student i at school s (0 = highest).
std::vector<std::vector<std::uint32_t>> priority_ranks(const Environment& env);

}  // namespace matchlab
