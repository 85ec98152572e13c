// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "matchlab/mechanisms.hpp"
#include "matchlab/model.hpp"

namespace matchlab {

/// A parsed problem file. Environment-only files leave `profile` empty.
struct ProblemFile {
  Environment environment;
  std::optional<PreferenceProfile> profile;
  std::vector<SchoolId> fpf_schools;

  /// Throws InvalidArgument when the file carries no preferences.
  Problem problem() const;

  friend bool operator==(const ProblemFile&, const ProblemFile&) = default;
};

// {students: [names], schools: [{name, capacity}],
//  priorities: {school: [students]} | {common: [students]},
//  preferences: {student: [schools]}, fpf_schools: [schools]}
ProblemFile parse_problem_file(std::string_view text);
/// A single object or an array of them.
std::vector<ProblemFile> parse_problem_files(std::string_view text);

ProblemFile load_problem_file(const std::filesystem::path& path);
std::vector<ProblemFile> load_problem_files(const std::filesystem::path& path);

std::string export_problem_file(const ProblemFile& file);

/// gs | sd | boston | fpf | chinese, then ":key=value" parts: k=N (all),
/// fpf=a,b (fpf), e=N or rounds=a,b,c (chinese). School names resolve
/// through `env` labels when given, else as s1..sm.
MechanismSpec parse_mechanism_spec(std::string_view text, const Environment* env = nullptr);
std::string format_mechanism_spec(const MechanismSpec& spec, const Environment* env = nullptr);

std::string format_outcome(Outcome o, const Environment& env);
std::string format_preference(const Preference& p, const Environment& env);
/// "{1:s2, 2:∅, ...}"
std::string format_matching(const Matching& mu, const Environment& env);
std::string format_profile(const PreferenceProfile& profile, const Environment& env);

/// Index of the student or school with this label.
StudentId find_student(const Environment& env, std::string_view label);
SchoolId find_school(const Environment& env, std::string_view label);

}  // namespace matchlab
