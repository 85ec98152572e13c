// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "matchlab/analysis.hpp"
#include "matchlab/domain.hpp"
#include "matchlab/io.hpp"
#include "matchlab/mechanisms.hpp"

namespace matchlab {

/// A named expectation; `evaluate` renders the actual value in the same
/// text form as `expected`.
struct GoldenCheck {
  std::string label;
  std::string expected;
  std::function<std::string(const ScanOptions&)> evaluate;
};

struct Fixture {
  std::string name;
  std::string description;
  ProblemFile problem;
  PreferenceDomain domain;
  std::vector<MechanismSpec> specs;
  std::vector<GoldenCheck> checks;
};

struct CheckResult {
  std::string label;
  std::string expected;
  std::string actual;
  bool passed = false;
};

const std::vector<std::string>& fixture_names();
/// Throws UnknownFixture.
Fixture fixture(std::string_view name);
std::vector<CheckResult> run_fixture(const Fixture& f, const ScanOptions& options = {});

/// Text forms shared by fixtures and the command line.
std::string describe_witness(const std::optional<ManipulationWitness>& w, const Environment& env);
std::string describe_nash(const NashVerdict& v, const Environment& env);
std::string describe_school_sets(const SchoolSets& sets, const Environment& env);

struct ChicagoModel {
  Environment environment;
  PreferenceDomain domain;  // tiered
  std::vector<std::vector<SchoolId>> tiers;
  /// (k, q-hat) for every requested constraint.
  std::vector<std::pair<std::size_t, std::uint64_t>> guarantees;
};

/// Common priority (student 0 highest), uniform seats, tiers of the given
/// sizes in school order. Ten schools take the Chicago selective high school
/// names.
ChicagoModel chicago_model(std::size_t n_students, const std::vector<std::size_t>& tier_sizes,
                           std::uint32_t seats_per_school, const std::vector<std::size_t>& constraints);

/// Fraction (count, total) of students for whom admission to every school
/// of `tier` is strategy-proof.
std::pair<std::size_t, std::size_t> tier_strategyproof_share(const SchoolSets& sets, const std::vector<SchoolId>& tier);

struct ReformRecord {
  std::string system;
  int year = 0;
  std::string from;  // mechanism spec text
  std::string to;
  std::string printed_manipulable;  // as printed: Less, More, Not comparable
  std::string printed_immune;
};

const std::vector<ReformRecord>& reform_table();

struct ReformReport {
  ReformRecord record;
  MechanismSpec from;
  MechanismSpec to;
  ComparisonReport immunity;           // A = to, B = from
  ManipulabilityReport manipulability;  // A = to, B = from
  std::string immune;                   // More | Less | Equal | Not comparable
  std::string manipulable;
  std::string scope;
};

/// Recomputes a row on the given environments. FPF specs without explicit
/// schools take `fpf_schools`.
ReformReport reform_report(const std::vector<Environment>& envs, const ReformRecord& record,
                           const PreferenceDomain& domain, const std::vector<SchoolId>& fpf_schools = {},
                           const ScanOptions& options = {});

std::string immunity_word(ImmunityVerdict v);
std::string manipulability_word(ManipulabilityVerdict v);

}  // namespace matchlab
