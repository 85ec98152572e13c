// SPDX-License-Identifier: Apache-2.0
#include "matchlab/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "matchlab/errors.hpp"

namespace matchlab {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::size_t line_at(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

// Line of the first occurrence of "field" as a key; 0 if absent.
std::size_t line_of(std::string_view text, const std::string& field) {
  const auto at = text.find("\"" + field + "\"");
  return at == std::string_view::npos ? 0 : line_at(text, at);
}

class FileParser {
 public:
  explicit FileParser(std::string_view text) : text_(text) {}

  ProblemFile parse(const json& doc) {
    if (!doc.is_object()) fail("problem must be a JSON object", "");
    ProblemFile file;
    auto& env = file.environment;

    const auto& students = require(doc, "students");
    if (!students.is_array()) fail("\"students\" must be an array of names", "students");
    for (const auto& s : students) env.student_labels.push_back(name_of(s, "students"));
    env.student_count = env.student_labels.size();

    const auto& schools = require(doc, "schools");
    if (!schools.is_array()) fail("\"schools\" must be an array", "schools");
    for (const auto& s : schools) {
      if (!s.is_object()) fail("each school must be an object {name, capacity}", "schools");
      env.school_labels.push_back(name_of(require(s, "name"), "name"));
      const auto& cap = require(s, "capacity");
      if (!cap.is_number_integer()) fail("capacity must be an integer", "capacity");
      const auto value = cap.get<std::int64_t>();
      if (value < 0 || value > std::numeric_limits<std::uint32_t>::max()) {
        violations_.push_back("capacity out of range at school " + env.school_labels.back());
        env.capacities.push_back(0);
      } else {
        env.capacities.push_back(static_cast<std::uint32_t>(value));
      }
    }

    index_names(env.student_labels, students_, "student");
    index_names(env.school_labels, schools_, "school");

    const auto& priorities = require(doc, "priorities");
    if (!priorities.is_object()) fail("\"priorities\" must be an object", "priorities");
    env.priorities.resize(env.school_count());
    if (priorities.contains("common")) {
      if (priorities.size() != 1) fail("\"common\" priority cannot be mixed with per-school orders", "common");
      const auto order = student_list(priorities["common"], "common");
      for (auto& p : env.priorities) p = order;
    } else {
      std::vector<bool> seen(env.school_count(), false);
      for (const auto& [name, list] : priorities.items()) {
        auto it = schools_.find(name);
        if (it == schools_.end()) {
          violations_.push_back("unknown school " + name + " in priorities");
          continue;
        }
        seen[it->second] = true;
        env.priorities[it->second] = student_list(list, name);
      }
      for (std::size_t s = 0; s < seen.size(); ++s) {
        if (!seen[s]) violations_.push_back("no priority order for school " + env.school_labels[s]);
      }
    }

    if (doc.contains("preferences")) {
      const auto& prefs = doc["preferences"];
      if (!prefs.is_object()) fail("\"preferences\" must be an object", "preferences");
      PreferenceProfile profile(env.student_count);
      std::vector<bool> seen(env.student_count, false);
      for (const auto& [name, list] : prefs.items()) {
        auto it = students_.find(name);
        if (it == students_.end()) {
          violations_.push_back("unknown student " + name + " in preferences");
          continue;
        }
        seen[it->second] = true;
        profile[it->second] = Preference(school_list(list, name, "preference of student " + name));
      }
      for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) violations_.push_back("no preference list for student " + env.student_labels[i]);
      }
      file.profile = std::move(profile);
    }

    if (doc.contains("fpf_schools")) {
      file.fpf_schools = school_list(doc["fpf_schools"], "fpf_schools", "fpf_schools");
      std::sort(file.fpf_schools.begin(), file.fpf_schools.end());
      file.fpf_schools.erase(std::unique(file.fpf_schools.begin(), file.fpf_schools.end()), file.fpf_schools.end());
    }

    for (const auto& [key, value] : doc.items()) {
      static const std::set<std::string> known{"students", "schools", "priorities", "preferences", "fpf_schools"};
      if (!known.contains(key)) fail("unknown field \"" + key + "\"", key);
    }

    if (violations_.empty()) {
      auto report = file.profile ? validate_problem(Problem{env, *file.profile}) : validate_environment(env);
      violations_ = std::move(report.violations);
    }
    if (!violations_.empty()) throw ValidationError(std::move(violations_));
    return file;
  }

 private:
  [[noreturn]] void fail(const std::string& message, const std::string& field) const {
    throw ParseError(message, field.empty() ? 1 : line_of(text_, field), field);
  }

  const json& require(const json& obj, const char* field) const {
    if (!obj.contains(field)) fail(std::string("missing field \"") + field + "\"", field);
    return obj.at(field);
  }

  std::string name_of(const json& v, const std::string& field) const {
    if (!v.is_string()) fail("names must be strings", field);
    return v.get<std::string>();
  }

  void index_names(const std::vector<std::string>& names, std::map<std::string, std::uint32_t>& index,
                   const char* kind) {
    for (std::uint32_t k = 0; k < names.size(); ++k) {
      if (!index.emplace(names[k], k).second) violations_.push_back(std::string("duplicate ") + kind + " " + names[k]);
    }
  }

  PriorityOrder student_list(const json& v, const std::string& field) {
    if (!v.is_array()) fail("priority order must be an array of student names", field);
    PriorityOrder out;
    for (const auto& item : v) {
      const auto name = name_of(item, field);
      auto it = students_.find(name);
      if (it == students_.end()) {
        violations_.push_back("unknown student " + name + " in priority of " + field);
        continue;
      }
      out.push_back(StudentId{it->second});
    }
    return out;
  }

  std::vector<SchoolId> school_list(const json& v, const std::string& field, const std::string& where) {
    if (!v.is_array()) fail("expected an array of school names", field);
    std::vector<SchoolId> out;
    for (const auto& item : v) {
      const auto name = name_of(item, field);
      auto it = schools_.find(name);
      if (it == schools_.end()) {
        violations_.push_back("unknown school " + name + " in " + where);
        continue;
      }
      out.push_back(SchoolId{it->second});
    }
    return out;
  }

  std::string_view text_;
  std::map<std::string, std::uint32_t> students_;
  std::map<std::string, std::uint32_t> schools_;
  std::vector<std::string> violations_;
};

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line_at(text, e.byte == 0 ? 0 : e.byte - 1), "");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

[[noreturn]] void spec_error(std::string_view text, const std::string& why) {
  throw SpecParseError("bad mechanism spec \"" + std::string(text) + "\": " + why);
}

std::size_t parse_count(std::string_view text, std::string_view value) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) {
    spec_error(text, "\"" + std::string(value) + "\" is not a natural number");
  }
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto at = s.find(sep, start);
    parts.push_back(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (at == std::string_view::npos) return parts;
    start = at + 1;
  }
}

}  // namespace

Problem ProblemFile::problem() const {
  if (!profile) throw InvalidArgument("file has no preferences");
  return Problem{environment, *profile};
}

ProblemFile parse_problem_file(std::string_view text) {
  const auto doc = parse_json(text);
  if (doc.is_array()) throw ParseError("expected a single problem, found an array", 1, "");
  return FileParser(text).parse(doc);
}

std::vector<ProblemFile> parse_problem_files(std::string_view text) {
  const auto doc = parse_json(text);
  std::vector<ProblemFile> out;
  if (!doc.is_array()) {
    out.push_back(FileParser(text).parse(doc));
    return out;
  }
  for (const auto& item : doc) out.push_back(FileParser(text).parse(item));
  if (out.empty()) throw ParseError("empty environment list", 1, "");
  return out;
}

ProblemFile load_problem_file(const std::filesystem::path& path) { return parse_problem_file(read_file(path)); }

std::vector<ProblemFile> load_problem_files(const std::filesystem::path& path) {
  return parse_problem_files(read_file(path));
}

std::string export_problem_file(const ProblemFile& file) {
  const auto& env = file.environment;
  ordered_json doc;
  ordered_json students = ordered_json::array();
  for (std::uint32_t i = 0; i < env.student_count; ++i) students.push_back(env.student_label(StudentId{i}));
  doc["students"] = students;
  ordered_json schools = ordered_json::array();
  for (std::uint32_t s = 0; s < env.school_count(); ++s) {
    schools.push_back({{"name", env.school_label(SchoolId{s})}, {"capacity", env.capacities[s]}});
  }
  doc["schools"] = schools;
  auto names = [&](const PriorityOrder& order) {
    ordered_json list = ordered_json::array();
    for (auto i : order) list.push_back(env.student_label(i));
    return list;
  };
  ordered_json priorities = ordered_json::object();
  if (env.school_count() > 0 && has_common_priority(env)) {
    priorities["common"] = names(env.priorities.front());
  } else {
    for (std::uint32_t s = 0; s < env.school_count(); ++s) priorities[env.school_label(SchoolId{s})] = names(env.priorities[s]);
  }
  doc["priorities"] = priorities;
  if (file.profile) {
    ordered_json prefs = ordered_json::object();
    for (std::uint32_t i = 0; i < file.profile->size(); ++i) {
      ordered_json list = ordered_json::array();
      for (auto s : (*file.profile)[i].ranking()) list.push_back(env.school_label(s));
      prefs[env.student_label(StudentId{i})] = list;
    }
    doc["preferences"] = prefs;
  }
  if (!file.fpf_schools.empty()) {
    ordered_json list = ordered_json::array();
    for (auto s : file.fpf_schools) list.push_back(env.school_label(s));
    doc["fpf_schools"] = list;
  }
  return doc.dump(2) + "\n";
}

StudentId find_student(const Environment& env, std::string_view label) {
  for (std::uint32_t i = 0; i < env.student_count; ++i) {
    if (env.student_label(StudentId{i}) == label) return StudentId{i};
  }
  throw InvalidArgument("unknown student " + std::string(label));
}

SchoolId find_school(const Environment& env, std::string_view label) {
  for (std::uint32_t s = 0; s < env.school_count(); ++s) {
    if (env.school_label(SchoolId{s}) == label) return SchoolId{s};
  }
  throw UnknownSchool("unknown school " + std::string(label));
}

MechanismSpec parse_mechanism_spec(std::string_view text, const Environment* env) {
  const auto parts = split(text, ':');
  const auto family = parts.front();
  MechanismSpec spec;
  if (family == "gs") spec.family = Family::GaleShapley;
  else if (family == "sd") spec.family = Family::SerialDictatorship;
  else if (family == "fpf") spec.family = Family::FirstPreferenceFirst;
  else if (family == "boston") spec.family = Family::Boston;
  else if (family == "chinese") spec.family = Family::ChineseParallel;
  else spec_error(text, "unknown mechanism \"" + std::string(family) + "\"");

  std::set<std::string_view> seen;
  for (std::size_t p = 1; p < parts.size(); ++p) {
    const auto eq = parts[p].find('=');
    if (eq == std::string_view::npos) spec_error(text, "expected key=value, got \"" + std::string(parts[p]) + "\"");
    const auto key = parts[p].substr(0, eq);
    const auto value = parts[p].substr(eq + 1);
    if (!seen.insert(key).second) spec_error(text, "repeated key \"" + std::string(key) + "\"");
    if (key == "k") {
      spec.constraint_k = parse_count(text, value);
      if (*spec.constraint_k == 0) spec_error(text, "k must be at least 1");
    } else if (key == "fpf" && spec.family == Family::FirstPreferenceFirst) {
      for (auto name : split(value, ',')) {
        if (env) {
          try {
            spec.fpf_schools.push_back(find_school(*env, name));
          } catch (const UnknownSchool&) {
            spec_error(text, "unknown school \"" + std::string(name) + "\"");
          }
        } else {
          if (name.size() < 2 || name[0] != 's') spec_error(text, "unknown school \"" + std::string(name) + "\"");
          const auto idx = parse_count(text, name.substr(1));
          if (idx == 0) spec_error(text, "unknown school \"" + std::string(name) + "\"");
          spec.fpf_schools.push_back(SchoolId{static_cast<std::uint32_t>(idx - 1)});
        }
      }
    } else if (key == "e" && spec.family == Family::ChineseParallel) {
      if (seen.contains("rounds")) spec_error(text, "e and rounds are exclusive");
      const auto e = parse_count(text, value);
      if (e == 0) spec_error(text, "e must be at least 1");
      spec.round_lengths = {e};
    } else if (key == "rounds" && spec.family == Family::ChineseParallel) {
      if (seen.contains("e")) spec_error(text, "e and rounds are exclusive");
      for (auto v : split(value, ',')) {
        const auto e = parse_count(text, v);
        if (e == 0) spec_error(text, "round lengths must be at least 1");
        spec.round_lengths.push_back(e);
      }
    } else {
      spec_error(text, "unknown key \"" + std::string(key) + "\" for " + std::string(family));
    }
  }
  if (spec.family == Family::ChineseParallel && spec.round_lengths.empty()) spec_error(text, "chinese needs e= or rounds=");
  std::sort(spec.fpf_schools.begin(), spec.fpf_schools.end());
  spec.fpf_schools.erase(std::unique(spec.fpf_schools.begin(), spec.fpf_schools.end()), spec.fpf_schools.end());
  return spec;
}

std::string format_mechanism_spec(const MechanismSpec& spec, const Environment* env) {
  std::string out;
  switch (spec.family) {
    case Family::GaleShapley: out = "gs"; break;
    case Family::SerialDictatorship: out = "sd"; break;
    case Family::FirstPreferenceFirst: out = "fpf"; break;
    case Family::Boston: out = "boston"; break;
    case Family::ChineseParallel: out = "chinese"; break;
  }
  if (spec.family == Family::ChineseParallel) {
    if (spec.round_lengths.size() == 1) {
      out += ":e=" + std::to_string(spec.round_lengths.front());
    } else {
      out += ":rounds=";
      for (std::size_t r = 0; r < spec.round_lengths.size(); ++r) {
        out += (r ? "," : "") + std::to_string(spec.round_lengths[r]);
      }
    }
  }
  if (spec.constraint_k) out += ":k=" + std::to_string(*spec.constraint_k);
  if (!spec.fpf_schools.empty()) {
    out += ":fpf=";
    for (std::size_t f = 0; f < spec.fpf_schools.size(); ++f) {
      if (f) out += ",";
      out += env ? env->school_label(spec.fpf_schools[f]) : "s" + std::to_string(spec.fpf_schools[f].value + 1);
    }
  }
  return out;
}

std::string format_outcome(Outcome o, const Environment& env) { return o ? env.school_label(*o) : "∅"; }

std::string format_preference(const Preference& p, const Environment& env) {
  if (p.empty()) return "∅";
  std::string out;
  for (auto s : p.ranking()) out += (out.empty() ? "" : " ") + env.school_label(s);
  return out;
}

std::string format_matching(const Matching& mu, const Environment& env) {
  std::string out = "{";
  for (std::uint32_t i = 0; i < mu.size(); ++i) {
    if (i) out += ", ";
    out += env.student_label(StudentId{i}) + ":" + format_outcome(mu[StudentId{i}], env);
  }
  return out + "}";
}

std::string format_profile(const PreferenceProfile& profile, const Environment& env) {
  std::string out;
  for (std::uint32_t i = 0; i < profile.size(); ++i) {
    if (i) out += "; ";
    out += env.student_label(StudentId{i}) + ": " + format_preference(profile[i], env);
  }
  return out;
}

}  // namespace matchlab
