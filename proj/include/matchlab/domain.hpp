// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "matchlab/model.hpp"

namespace matchlab {

inline constexpr std::uint64_t kDefaultSizeCap = 10'000'000;

/// All rankings of length 0..min(max_len, m), ordered by length and then
/// lexicographically by school index.
std::vector<Preference> enumerate_preferences(std::size_t m, std::optional<std::size_t> max_len = {});

/// Number of rankings enumerate_preferences would produce.
std::uint64_t count_preferences(std::size_t m, std::optional<std::size_t> max_len = {});

/// Full-length rankings putting every tier above the next; tier order free.
std::vector<Preference> enumerate_tiered(std::span<const std::vector<SchoolId>> tiers);

/// The per-student sets of preference relations an audit quantifies over.
/// True preferences come from `types`; misreports come from the student's
/// own entry unless `full_misreports` opens them to every ranking.
struct PreferenceDomain {
  enum class Kind { FullEnumeration, Tiered, Explicit, Sampled };

  Kind kind = Kind::FullEnumeration;
  std::optional<std::size_t> max_len;                 // FullEnumeration, Sampled
  std::vector<std::vector<SchoolId>> tiers;           // Tiered
  std::vector<std::vector<Preference>> lists;         // Explicit, one entry per student
  std::size_t sample_count = 0;                       // Sampled
  std::uint64_t seed = 0;                             // Sampled
  bool full_misreports = false;
  std::optional<std::size_t> misreport_max_len;
  /// Cap on mechanism evaluations; exceeding it is an error.
  std::uint64_t size_cap = kDefaultSizeCap;

  static PreferenceDomain full(std::optional<std::size_t> max_len = {});
  static PreferenceDomain tiered(std::vector<std::vector<SchoolId>> tiers);
  static PreferenceDomain explicit_lists(std::vector<std::vector<Preference>> lists);
  /// Each student's only type is their entry in `profile`.
  static PreferenceDomain explicit_profile(const PreferenceProfile& profile);
  static PreferenceDomain sampled(std::size_t count, std::uint64_t seed, std::optional<std::size_t> max_len = {});

  PreferenceDomain& with_full_misreports(std::optional<std::size_t> max_len = {});
  PreferenceDomain& with_cap(std::uint64_t cap);

  std::vector<Preference> types(StudentId i, std::size_t m) const;
  std::vector<Preference> reports(StudentId i, std::size_t m) const;

  /// False for sampled domains: their verdicts are not exhaustive.
  bool exhaustive() const noexcept { return kind != Kind::Sampled; }
  /// Human-readable label carried by every report.
  std::string describe() const;
};

}  // namespace matchlab
