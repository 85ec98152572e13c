// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "matchlab/domain.hpp"
#include "matchlab/mechanisms.hpp"
#include "matchlab/model.hpp"

namespace matchlab {

struct ScanOptions {
  /// Worker count; 0 means std::thread::hardware_concurrency(). Results do
  /// not depend on it.
  unsigned threads = 0;
  /// Skip P_{-i} where ranking s first does not win s (no report can).
  bool prefilter = true;
  /// For constrained GS/SD, skip true types that cannot carry a witness.
  bool prune = true;
};

struct ManipulationWitness {
  PreferenceProfile profile;  // true preferences
  StudentId student;
  Preference misreport;
  Outcome truthful_outcome;
  Outcome deviating_outcome;
  std::optional<SchoolId> target_school;

  friend bool operator==(const ManipulationWitness&, const ManipulationWitness&) = default;
};

/// First misreport in `domain.reports(i)` that improves on truth-telling at p.
std::optional<ManipulationWitness> find_manipulation(const MechanismSpec& spec, const Problem& p, StudentId i,
                                                     const PreferenceDomain& domain);

/// First manipulation by any student, students in index order.
std::optional<ManipulationWitness> is_vulnerable(const MechanismSpec& spec, const Problem& p,
                                                 const PreferenceDomain& domain);

struct AdmissionVerdict {
  bool strategyproof = true;
  std::optional<ManipulationWitness> witness;
  std::string domain;
  bool exhaustive = true;
};

AdmissionVerdict strategyproof_admission(const MechanismSpec& spec, const Environment& env, StudentId i,
                                         SchoolId s, const PreferenceDomain& domain, const ScanOptions& options = {});

struct SchoolSets {
  /// sp[i][s]: admission to s is strategy-proof to i.
  std::vector<std::vector<bool>> sp;
  /// First witness for every NotSP pair.
  std::vector<std::vector<std::optional<ManipulationWitness>>> witnesses;

  std::vector<SchoolId> schools_of(StudentId i) const;
};

SchoolSets strategyproof_school_sets(const MechanismSpec& spec, const Environment& env,
                                     const PreferenceDomain& domain, const ScanOptions& options = {});

enum class ImmunityVerdict { AMoreImmune, BMoreImmune, Equal, Incomparable };

/// Set-inclusion verdict from two flag matrices of equal shape.
ImmunityVerdict immunity_verdict(const SchoolSets& a, const SchoolSets& b);

struct SetDifference {
  StudentId student;
  SchoolId school;
  /// True when the pair is SP under A only; the witness then comes from B.
  bool sp_under_a = false;
  ManipulationWitness witness;
};

struct EnvironmentImmunity {
  SchoolSets a;
  SchoolSets b;
  ImmunityVerdict verdict = ImmunityVerdict::Equal;
  std::vector<SetDifference> differences;
};

struct ComparisonReport {
  std::vector<EnvironmentImmunity> environments;
  ImmunityVerdict verdict = ImmunityVerdict::Equal;
  std::string domain;
  bool exhaustive = true;
  /// The verdict covers only the supplied environments.
  std::string scope;
};

ComparisonReport compare_immunity(const MechanismSpec& a, const MechanismSpec& b, const std::vector<Environment>& envs,
                                  const PreferenceDomain& domain, const ScanOptions& options = {});

enum class ManipulabilityVerdict { ALess, BLess, Equal, Incomparable };

struct EnvironmentManipulability {
  std::uint64_t profiles = 0;
  std::uint64_t vulnerable_a = 0;
  std::uint64_t vulnerable_b = 0;
  std::uint64_t only_a = 0;
  std::uint64_t only_b = 0;
  /// First profile vulnerable under one spec only, with its witness.
  std::optional<ManipulationWitness> only_a_example;
  std::optional<ManipulationWitness> only_b_example;
  ManipulabilityVerdict verdict = ManipulabilityVerdict::Equal;
};

struct ManipulabilityReport {
  std::vector<EnvironmentManipulability> environments;
  ManipulabilityVerdict verdict = ManipulabilityVerdict::Equal;
  std::string domain;
  bool exhaustive = true;
  std::string scope;
};

ManipulabilityReport compare_manipulability(const MechanismSpec& a, const MechanismSpec& b,
                                            const std::vector<Environment>& envs, const PreferenceDomain& domain,
                                            const ScanOptions& options = {});

struct NashVerdict {
  bool equilibrium = true;
  std::optional<StudentId> deviator;
  std::optional<Preference> deviation;
  Outcome current;   // deviator's outcome under `reported`
  Outcome improved;  // what the deviation gets instead

  friend bool operator==(const NashVerdict&, const NashVerdict&) = default;
};

/// Students in index order, reports in domain order; the first improving
/// unilateral deviation (judged by true_profile) refutes equilibrium.
NashVerdict is_nash_equilibrium(const MechanismSpec& spec, const PreferenceProfile& true_profile,
                                const PreferenceProfile& reported, const Environment& env,
                                const PreferenceDomain& domain);

struct EquilibriumAdmissionVerdict {
  bool strategyproof = true;
  std::optional<ManipulationWitness> witness;
  /// Equilibrium check of (misreport, P_{-i}) re-run independently.
  std::optional<NashVerdict> certificate;
  std::string domain;
  bool exhaustive = true;
};

EquilibriumAdmissionVerdict strategyproof_admission_in_equilibrium(const MechanismSpec& spec, const Environment& env,
                                                                   StudentId i, SchoolId s,
                                                                   const PreferenceDomain& domain,
                                                                   const ScanOptions& options = {});

/// Sum of the k smallest capacities.
std::uint64_t sd_guarantee(const Environment& env, std::size_t k);

struct SdCharacterization {
  bool agrees = true;
  bool left = true;   // p is not vulnerable under SD^k
  bool right = true;  // SD^k(P) = SD(P)
};

SdCharacterization sd_vulnerability_characterization(const Problem& p, std::size_t k,
                                                     const PreferenceDomain& domain = PreferenceDomain::full());

/// Evaluation counts the audits above would need; compared against size_cap.
std::uint64_t estimate_admission_evaluations(const MechanismSpec& spec, const Environment& env, StudentId i,
                                             const PreferenceDomain& domain);
std::uint64_t estimate_vulnerability_evaluations(const MechanismSpec& spec, const Environment& env,
                                                 const PreferenceDomain& domain);

}  // namespace matchlab
