// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "matchlab/model.hpp"

namespace matchlab {

enum class Family { GaleShapley, SerialDictatorship, FirstPreferenceFirst, Boston, ChineseParallel };

struct MechanismSpec {
  Family family = Family::GaleShapley;
  /// List constraint k; absent means unconstrained.
  std::optional<std::size_t> constraint_k;
  /// First-preference-first schools (FPF family only), sorted and unique.
  std::vector<SchoolId> fpf_schools;
  /// Chinese family only. One entry is the symmetric mechanism Ch^(e); a
  /// longer list gives per-round lengths, the last one repeating.
  std::vector<std::size_t> round_lengths;

  static MechanismSpec gs(std::optional<std::size_t> k = {});
  static MechanismSpec sd(std::optional<std::size_t> k = {});
  static MechanismSpec fpf(std::vector<SchoolId> schools, std::optional<std::size_t> k = {});
  static MechanismSpec boston(std::optional<std::size_t> k = {});
  static MechanismSpec chinese(std::size_t e, std::optional<std::size_t> k = {});
  static MechanismSpec chinese_rounds(std::vector<std::size_t> lengths, std::optional<std::size_t> k = {});

  friend bool operator==(const MechanismSpec&, const MechanismSpec&) = default;
};

/// Throws InvalidArgument on structurally bad specs (k = 0, e = 0, stray fields).
void check_spec(const MechanismSpec& spec);

enum class ProposalOrder { LowestIndexFirst, HighestIndexFirst };

/// Student-optimal stable matching via student-proposing deferred acceptance.
Matching gale_shapley(const Problem& p, ProposalOrder order = ProposalOrder::LowestIndexFirst);

/// Students pick in common-priority order. Throws CommonPriorityViolation.
Matching serial_dictatorship(const Problem& p);

/// Re-sorts each FPF school's priority by the rank students give it in
/// `profile`; students not listing the school form the last group.
Environment adjust_priorities_fpf(const PreferenceProfile& profile, const Environment& env,
                                  std::span<const SchoolId> fpf_schools);

Matching first_preference_first(const Problem& p, std::span<const SchoolId> fpf_schools);

/// Immediate acceptance, round by round.
Matching boston(const Problem& p);

Matching chinese_parallel(const Problem& p, std::size_t e);
Matching chinese_parallel(const Problem& p, std::span<const std::size_t> round_lengths);
/// Cumulative matching after each executed round.
std::vector<Matching> chinese_parallel_rounds(const Problem& p, std::span<const std::size_t> round_lengths);

/// phi^k(P) = phi(P^k), dispatched on the family.
Matching apply_mechanism(const MechanismSpec& spec, const Problem& p);

/// A mechanism bound to one environment, evaluating many profiles without
/// allocating. Not thread-safe; give each worker its own runner.
class MechanismRunner {
 public:
  static constexpr std::int32_t kUnmatched = -1;

  MechanismRunner(const MechanismSpec& spec, const Environment& env);

  std::size_t student_count() const noexcept { return n_; }
  std::size_t school_count() const noexcept { return m_; }
  const MechanismSpec& spec() const noexcept { return spec_; }

  /// reports[i] is student i's submitted ranking; out[i] receives a school
  /// index or kUnmatched.
  void run(std::span<const std::span<const SchoolId>> reports, std::span<std::int32_t> out);
  Matching run(const PreferenceProfile& profile);

  /// Per-round cumulative assignment (Chinese); other families yield one entry.
  std::vector<Matching> run_rounds(const PreferenceProfile& profile);

  void set_proposal_order(ProposalOrder order) noexcept { order_ = order; }
  std::uint64_t evaluations() const noexcept { return evaluations_; }

 private:
  void deferred_acceptance(std::span<const std::span<const SchoolId>> reports, std::size_t limit,
                           const std::uint32_t* keys, std::span<const std::uint32_t> caps,
                           std::span<std::int32_t> out);
  void immediate_acceptance(std::span<const std::span<const SchoolId>> reports, std::size_t limit,
                            std::span<std::int32_t> out);
  void serial_pick(std::span<const std::span<const SchoolId>> reports, std::size_t limit,
                   std::span<std::int32_t> out);
  void chinese(std::span<const std::span<const SchoolId>> reports, std::size_t limit,
               std::span<std::int32_t> out, std::vector<std::vector<std::int32_t>>* trace);
  void build_fpf_keys(std::span<const std::span<const SchoolId>> reports, std::size_t limit);

  MechanismSpec spec_;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::size_t limit_ = 0;
  ProposalOrder order_ = ProposalOrder::LowestIndexFirst;
  std::uint64_t evaluations_ = 0;

  std::vector<std::uint32_t> caps_;
  std::vector<std::uint32_t> ranks_;     // ranks_[s * n + i]
  std::vector<std::uint32_t> keys_;      // adjusted priorities for FPF
  std::vector<std::uint8_t> fpf_mask_;
  std::vector<StudentId> common_order_;  // SD only

  // scratch
  std::vector<std::uint32_t> holders_;
  std::vector<std::uint32_t> holder_offset_;
  std::vector<std::uint32_t> held_;
  std::vector<std::uint32_t> next_;
  std::vector<std::uint32_t> free_;
  std::vector<std::uint32_t> remaining_;
  std::vector<std::uint8_t> active_;
  std::vector<std::int32_t> round_out_;
  std::vector<std::int32_t> apply_;
};

}  // namespace matchlab
