// SPDX-License-Identifier: Apache-2.0
#include "matchlab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "matchlab/analysis.hpp"
#include "matchlab/errors.hpp"
#include "matchlab/io.hpp"
#include "matchlab/scenarios.hpp"
#include "matchlab/stability.hpp"

namespace matchlab {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

struct Settings {
  std::string format = "human";
  std::uint64_t cap = 0;  // 0: MATCHLAB_CAP or the library default
  std::uint64_t seed = 0;
  std::size_t max_len = 0;  // 0: no cap
  unsigned threads = 0;
  std::string domain = "full";

  bool json() const { return format == "json"; }
  ScanOptions scan() const { return ScanOptions{threads, true, true}; }
};

// Distinguishes usage problems found after CLI11 has finished parsing.
struct UsageError : Error {
  using Error::Error;
};

std::uint64_t effective_cap(const Settings& s) {
  if (s.cap) return s.cap;
  if (const char* env = std::getenv("MATCHLAB_CAP"); env && *env) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (*end || v == 0) throw UsageError(std::string("MATCHLAB_CAP must be a positive integer, got \"") + env + "\"");
    return v;
  }
  return kDefaultSizeCap;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::optional<std::size_t> max_len(const Settings& s) {
  if (s.max_len == 0) return std::nullopt;
  return s.max_len;
}

// full | profile | tiered:a,b/c,d | sampled:N
PreferenceDomain make_domain(const Settings& s, const ProblemFile& file) {
  PreferenceDomain d;
  const auto& spec = s.domain;
  if (spec == "full") {
    d = PreferenceDomain::full(max_len(s));
  } else if (spec == "profile") {
    if (!file.profile) throw UsageError("--domain profile needs a file with preferences");
    d = PreferenceDomain::explicit_profile(*file.profile).with_full_misreports(max_len(s));
  } else if (spec.rfind("tiered:", 0) == 0) {
    std::vector<std::vector<SchoolId>> tiers;
    for (const auto& tier : split(spec.substr(7), '/')) {
      std::vector<SchoolId> t;
      for (const auto& name : split(tier, ',')) t.push_back(find_school(file.environment, name));
      tiers.push_back(std::move(t));
    }
    d = PreferenceDomain::tiered(std::move(tiers)).with_full_misreports(max_len(s));
  } else if (spec.rfind("sampled:", 0) == 0) {
    char* end = nullptr;
    const auto count = std::strtoull(spec.c_str() + 8, &end, 10);
    if (*end || count == 0) throw UsageError("bad sample count in --domain " + spec);
    d = PreferenceDomain::sampled(count, s.seed, max_len(s)).with_full_misreports(max_len(s));
  } else {
    throw UsageError("unknown --domain \"" + spec + "\" (full | profile | tiered:a,b/c | sampled:N)");
  }
  d.with_cap(effective_cap(s));
  return d;
}

std::pair<StudentId, SchoolId> parse_admission(const std::string& text, const Environment& env) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw UsageError("--admission expects student:school, got \"" + text + "\"");
  return {find_student(env, text.substr(0, colon)), find_school(env, text.substr(colon + 1))};
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// A full problem file, or {"preferences": {...}} over the students and
// schools of `base`.
PreferenceProfile load_reported(const std::string& path, const ProblemFile& base) {
  const auto text = read_text(path);
  auto doc = nlohmann::json::parse(text, nullptr, false);
  if (!doc.is_discarded() && doc.is_object() && !doc.contains("students")) {
    ProblemFile shell = base;
    shell.profile.reset();
    auto merged = nlohmann::ordered_json::parse(export_problem_file(shell));
    merged["preferences"] = doc.value("preferences", nlohmann::json::object());
    const auto parsed = parse_problem_file(merged.dump());
    return *parsed.profile;
  }
  const auto parsed = parse_problem_file(text);
  if (!parsed.profile) throw UsageError(path + " has no preferences");
  if (parsed.environment.student_labels != base.environment.student_labels ||
      parsed.environment.school_labels != base.environment.school_labels) {
    throw UsageError(path + " names different students or schools");
  }
  return *parsed.profile;
}

// JSON renderers.

ordered_json outcome_json(Outcome o, const Environment& env) {
  return o ? ordered_json(env.school_label(*o)) : ordered_json(nullptr);
}

ordered_json preference_json(const Preference& p, const Environment& env) {
  auto out = ordered_json::array();
  for (auto s : p.ranking()) out.push_back(env.school_label(s));
  return out;
}

ordered_json profile_json(const PreferenceProfile& profile, const Environment& env) {
  ordered_json out = ordered_json::object();
  for (std::uint32_t i = 0; i < profile.size(); ++i) out[env.student_label(StudentId{i})] = preference_json(profile[i], env);
  return out;
}

ordered_json matching_json(const Matching& mu, const Environment& env) {
  ordered_json out = ordered_json::object();
  for (std::uint32_t i = 0; i < mu.size(); ++i) out[env.student_label(StudentId{i})] = outcome_json(mu[StudentId{i}], env);
  return out;
}

ordered_json witness_json(const std::optional<ManipulationWitness>& w, const Environment& env) {
  if (!w) return nullptr;
  ordered_json out;
  out["student"] = env.student_label(w->student);
  out["misreport"] = preference_json(w->misreport, env);
  out["truthful_outcome"] = outcome_json(w->truthful_outcome, env);
  out["deviating_outcome"] = outcome_json(w->deviating_outcome, env);
  if (w->target_school) out["target_school"] = env.school_label(*w->target_school);
  out["profile"] = profile_json(w->profile, env);
  return out;
}

ordered_json nash_json(const NashVerdict& v, const Environment& env) {
  ordered_json out;
  out["equilibrium"] = v.equilibrium;
  if (!v.equilibrium) {
    out["deviator"] = env.student_label(*v.deviator);
    out["deviation"] = preference_json(*v.deviation, env);
    out["current"] = outcome_json(v.current, env);
    out["improved"] = outcome_json(v.improved, env);
  }
  return out;
}

ordered_json school_sets_json(const SchoolSets& sets, const Environment& env) {
  ordered_json out = ordered_json::object();
  for (std::uint32_t i = 0; i < sets.sp.size(); ++i) {
    auto schools = ordered_json::array();
    for (auto s : sets.schools_of(StudentId{i})) schools.push_back(env.school_label(s));
    out[env.student_label(StudentId{i})] = schools;
  }
  return out;
}

std::string immunity_code(ImmunityVerdict v) {
  switch (v) {
    case ImmunityVerdict::AMoreImmune: return "A-more-immune";
    case ImmunityVerdict::BMoreImmune: return "B-more-immune";
    case ImmunityVerdict::Equal: return "equal";
    case ImmunityVerdict::Incomparable: return "incomparable";
  }
  return "";
}

std::string manipulability_code(ManipulabilityVerdict v) {
  switch (v) {
    case ManipulabilityVerdict::ALess: return "A-less-manipulable";
    case ManipulabilityVerdict::BLess: return "B-less-manipulable";
    case ManipulabilityVerdict::Equal: return "equal";
    case ManipulabilityVerdict::Incomparable: return "incomparable";
  }
  return "";
}

ordered_json envelope(const std::string& command) {
  ordered_json doc;
  doc["schema"] = kSchemaVersion;
  doc["command"] = command;
  return doc;
}

std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

// Subcommands. Each returns an exit code and writes to `out`.

struct MatchArgs {
  std::string file, mech;
};

int cmd_match(const MatchArgs& a, const Settings& s, std::ostream& out) {
  const auto file = load_problem_file(a.file);
  const auto problem = file.problem();
  const auto& env = file.environment;
  auto spec = parse_mechanism_spec(a.mech, &env);
  if (spec.family == Family::FirstPreferenceFirst && spec.fpf_schools.empty()) spec.fpf_schools = file.fpf_schools;
  const auto mu = apply_mechanism(spec, problem);
  // Constrained mechanisms are judged against the lists they actually saw.
  Problem seen = problem;
  if (spec.constraint_k) seen.profile = truncate(problem.profile, *spec.constraint_k);
  const bool stable = is_stable(seen, mu);
  const auto envy = justified_envy_pairs(seen, mu);
  const bool ir = is_individually_rational(seen, mu);
  const bool nw = is_non_wasteful(seen, mu);

  if (s.json()) {
    auto doc = envelope("match");
    doc["mechanism"] = format_mechanism_spec(spec, &env);
    doc["matching"] = matching_json(mu, env);
    ordered_json st;
    st["judged_against"] = spec.constraint_k ? "truncated" : "submitted";
    st["stable"] = stable;
    st["individually_rational"] = ir;
    st["non_wasteful"] = nw;
    auto pairs = ordered_json::array();
    for (const auto& e : envy) {
      pairs.push_back({{"envious", env.student_label(e.envious)},
                       {"envied", env.student_label(e.envied)},
                       {"school", env.school_label(e.school)}});
    }
    st["justified_envy"] = pairs;
    doc["stability"] = st;
    out << dump(doc);
    return kExitOk;
  }
  out << "mechanism: " << format_mechanism_spec(spec, &env) << "\n";
  out << "matching:  " << format_matching(mu, env) << "\n";
  out << "stability (against " << (spec.constraint_k ? "truncated" : "submitted") << " lists): "
      << (stable ? "stable" : "not stable") << "\n";
  out << "  individually rational: " << (ir ? "yes" : "no") << "\n";
  out << "  non-wasteful:          " << (nw ? "yes" : "no") << "\n";
  out << "  justified envy:        " << (envy.empty() ? "none" : "") << "\n";
  for (const auto& e : envy) {
    out << "    " << env.student_label(e.envious) << " envies " << env.student_label(e.envied) << " at "
        << env.school_label(e.school) << "\n";
  }
  return kExitOk;
}

struct AuditArgs {
  std::string file, mech, admission;
};

int cmd_audit(const AuditArgs& a, const Settings& s, std::ostream& out) {
  const auto file = load_problem_file(a.file);
  const auto& env = file.environment;
  auto spec = parse_mechanism_spec(a.mech, &env);
  if (spec.family == Family::FirstPreferenceFirst && spec.fpf_schools.empty()) spec.fpf_schools = file.fpf_schools;
  const auto domain = make_domain(s, file);
  const auto mech = format_mechanism_spec(spec, &env);

  if (!a.admission.empty()) {
    const auto [i, school] = parse_admission(a.admission, env);
    const auto v = strategyproof_admission(spec, env, i, school, domain, s.scan());
    if (s.json()) {
      auto doc = envelope("audit");
      doc["mechanism"] = mech;
      doc["domain"] = v.domain;
      doc["exhaustive"] = v.exhaustive;
      doc["student"] = env.student_label(i);
      doc["school"] = env.school_label(school);
      doc["strategyproof"] = v.strategyproof;
      doc["witness"] = witness_json(v.witness, env);
      out << dump(doc);
    } else {
      out << "mechanism: " << mech << "\ndomain:    " << v.domain << "\n";
      out << "admission to " << env.school_label(school) << " for " << env.student_label(i) << ": "
          << (v.strategyproof ? "strategy-proof" : "not strategy-proof") << "\n";
      if (v.witness) {
        out << "witness:   " << describe_witness(v.witness, env) << "\n";
        out << "  at true profile " << format_profile(v.witness->profile, env) << "\n";
      }
      if (!v.exhaustive) out << "note: sampled domain, the verdict is not exhaustive\n";
    }
    return v.strategyproof ? kExitOk : kExitNegative;
  }

  const auto sets = strategyproof_school_sets(spec, env, domain, s.scan());
  if (s.json()) {
    auto doc = envelope("audit");
    doc["mechanism"] = mech;
    doc["domain"] = domain.describe();
    doc["exhaustive"] = domain.exhaustive();
    doc["strategyproof_schools"] = school_sets_json(sets, env);
    ordered_json ws = ordered_json::object();
    for (std::uint32_t i = 0; i < sets.sp.size(); ++i) {
      ordered_json per = ordered_json::object();
      for (std::uint32_t k = 0; k < sets.sp[i].size(); ++k) {
        if (!sets.sp[i][k]) per[env.school_label(SchoolId{k})] = witness_json(sets.witnesses[i][k], env);
      }
      ws[env.student_label(StudentId{i})] = per;
    }
    doc["witnesses"] = ws;
    out << dump(doc);
    return kExitOk;
  }
  out << "mechanism: " << mech << "\ndomain:    " << domain.describe() << "\n";
  out << "strategy-proof admissions per student:\n";
  for (std::uint32_t i = 0; i < sets.sp.size(); ++i) {
    out << "  " << env.student_label(StudentId{i}) << ": {";
    bool first = true;
    for (auto k : sets.schools_of(StudentId{i})) {
      out << (first ? "" : ", ") << env.school_label(k);
      first = false;
    }
    out << "}\n";
    for (std::uint32_t k = 0; k < sets.sp[i].size(); ++k) {
      if (!sets.sp[i][k]) {
        out << "    not " << env.school_label(SchoolId{k}) << ": " << describe_witness(sets.witnesses[i][k], env)
            << " at " << format_profile(sets.witnesses[i][k]->profile, env) << "\n";
      }
    }
  }
  if (!domain.exhaustive()) out << "note: sampled domain, the sets are upper bounds\n";
  return kExitOk;
}

struct CompareArgs {
  std::string file, a, b, criterion = "immunity";
};

int cmd_compare(const CompareArgs& args, const Settings& s, std::ostream& out) {
  const auto files = load_problem_files(args.file);
  std::vector<Environment> envs;
  for (const auto& f : files) envs.push_back(f.environment);
  const auto& env = envs.front();
  auto a = parse_mechanism_spec(args.a, &env);
  auto b = parse_mechanism_spec(args.b, &env);
  for (auto* spec : {&a, &b}) {
    if (spec->family == Family::FirstPreferenceFirst && spec->fpf_schools.empty()) spec->fpf_schools = files.front().fpf_schools;
  }
  const bool want_imm = args.criterion != "manipulability";
  const bool want_man = args.criterion != "immunity";
  const auto domain = make_domain(s, files.front());

  std::optional<ComparisonReport> imm;
  std::optional<ManipulabilityReport> man;
  if (want_imm) imm = compare_immunity(a, b, envs, domain, s.scan());
  if (want_man) man = compare_manipulability(a, b, envs, domain, s.scan());
  bool ok = true;
  if (imm) ok = ok && imm->verdict == ImmunityVerdict::AMoreImmune;
  if (man) ok = ok && man->verdict == ManipulabilityVerdict::ALess;

  if (s.json()) {
    auto doc = envelope("compare");
    doc["a"] = format_mechanism_spec(a, &env);
    doc["b"] = format_mechanism_spec(b, &env);
    doc["domain"] = domain.describe();
    doc["exhaustive"] = domain.exhaustive();
    doc["scope"] = imm ? imm->scope : man->scope;
    if (imm) {
      ordered_json j;
      j["verdict"] = immunity_code(imm->verdict);
      auto list = ordered_json::array();
      for (std::size_t e = 0; e < imm->environments.size(); ++e) {
        const auto& ei = imm->environments[e];
        const auto& en = envs[e];
        ordered_json item;
        item["verdict"] = immunity_code(ei.verdict);
        item["strategyproof_a"] = school_sets_json(ei.a, en);
        item["strategyproof_b"] = school_sets_json(ei.b, en);
        auto diffs = ordered_json::array();
        for (const auto& d : ei.differences) {
          diffs.push_back({{"student", en.student_label(d.student)},
                           {"school", en.school_label(d.school)},
                           {"strategyproof_under", d.sp_under_a ? "A" : "B"},
                           {"witness", witness_json(d.witness, en)}});
        }
        item["differences"] = diffs;
        list.push_back(item);
      }
      j["environments"] = list;
      doc["immunity"] = j;
    }
    if (man) {
      ordered_json j;
      j["verdict"] = manipulability_code(man->verdict);
      auto list = ordered_json::array();
      for (std::size_t e = 0; e < man->environments.size(); ++e) {
        const auto& em = man->environments[e];
        const auto& en = envs[e];
        list.push_back({{"verdict", manipulability_code(em.verdict)},
                        {"profiles", em.profiles},
                        {"vulnerable_a", em.vulnerable_a},
                        {"vulnerable_b", em.vulnerable_b},
                        {"only_a", em.only_a},
                        {"only_b", em.only_b},
                        {"only_a_example", witness_json(em.only_a_example, en)},
                        {"only_b_example", witness_json(em.only_b_example, en)}});
      }
      j["environments"] = list;
      doc["manipulability"] = j;
    }
    out << dump(doc);
    return ok ? kExitOk : kExitNegative;
  }

  out << "A: " << format_mechanism_spec(a, &env) << "\nB: " << format_mechanism_spec(b, &env) << "\n";
  out << "domain: " << domain.describe() << "\n";
  if (imm) {
    out << "immunity: " << immunity_code(imm->verdict) << "\n";
    for (std::size_t e = 0; e < imm->environments.size(); ++e) {
      const auto& ei = imm->environments[e];
      const auto& en = envs[e];
      if (envs.size() > 1) out << "  environment " << e + 1 << ": " << immunity_code(ei.verdict) << "\n";
      for (const auto& d : ei.differences) {
        out << "  (" << en.student_label(d.student) << ", " << en.school_label(d.school) << ") strategy-proof under "
            << (d.sp_under_a ? "A" : "B") << " only; witness under " << (d.sp_under_a ? "B" : "A") << ": "
            << describe_witness(d.witness, en) << " at " << format_profile(d.witness.profile, en) << "\n";
      }
    }
  }
  if (man) {
    out << "manipulability: " << manipulability_code(man->verdict) << "\n";
    for (std::size_t e = 0; e < man->environments.size(); ++e) {
      const auto& em = man->environments[e];
      const auto& en = envs[e];
      out << "  " << (envs.size() > 1 ? "environment " + std::to_string(e + 1) + ": " : "") << em.vulnerable_a
          << " of " << em.profiles << " profiles vulnerable under A, " << em.vulnerable_b << " under B\n";
      if (em.only_a_example) {
        out << "  vulnerable under A only: " << format_profile(em.only_a_example->profile, en) << " ("
            << describe_witness(em.only_a_example, en) << ")\n";
      }
      if (em.only_b_example) {
        out << "  vulnerable under B only: " << format_profile(em.only_b_example->profile, en) << " ("
            << describe_witness(em.only_b_example, en) << ")\n";
      }
    }
  }
  out << "scope: " << (imm ? imm->scope : man->scope) << "\n";
  return ok ? kExitOk : kExitNegative;
}

struct EquilibriumArgs {
  std::string file, mech, reported, admission;
};

int cmd_equilibrium(const EquilibriumArgs& a, const Settings& s, std::ostream& out) {
  const auto file = load_problem_file(a.file);
  const auto& env = file.environment;
  auto spec = parse_mechanism_spec(a.mech, &env);
  if (spec.family == Family::FirstPreferenceFirst && spec.fpf_schools.empty()) spec.fpf_schools = file.fpf_schools;
  const auto mech = format_mechanism_spec(spec, &env);

  if (!a.admission.empty()) {
    const auto domain = make_domain(s, file);
    const auto [i, school] = parse_admission(a.admission, env);
    const auto v = strategyproof_admission_in_equilibrium(spec, env, i, school, domain, s.scan());
    if (s.json()) {
      auto doc = envelope("equilibrium");
      doc["mechanism"] = mech;
      doc["domain"] = v.domain;
      doc["exhaustive"] = v.exhaustive;
      doc["student"] = env.student_label(i);
      doc["school"] = env.school_label(school);
      doc["strategyproof_in_equilibrium"] = v.strategyproof;
      doc["witness"] = witness_json(v.witness, env);
      doc["certificate"] = v.certificate ? nash_json(*v.certificate, env) : ordered_json(nullptr);
      out << dump(doc);
    } else {
      out << "mechanism: " << mech << "\ndomain:    " << v.domain << "\n";
      out << "admission to " << env.school_label(school) << " for " << env.student_label(i) << " in equilibrium: "
          << (v.strategyproof ? "strategy-proof" : "not strategy-proof") << "\n";
      if (v.witness) {
        out << "witness:   " << describe_witness(v.witness, env) << "\n";
        out << "  at true profile " << format_profile(v.witness->profile, env) << "\n";
        out << "  equilibrium check: " << describe_nash(*v.certificate, env) << "\n";
      }
    }
    return v.strategyproof ? kExitOk : kExitNegative;
  }

  const auto problem = file.problem();
  const auto reported = a.reported.empty() ? problem.profile : load_reported(a.reported, file);
  // Deviations range over all rankings unless --max-len narrows them.
  auto domain = PreferenceDomain::full(max_len(s));
  domain.with_cap(effective_cap(s));
  const auto v = is_nash_equilibrium(spec, problem.profile, reported, env, domain);
  const auto mu = apply_mechanism(spec, Problem{env, reported});
  if (s.json()) {
    auto doc = envelope("equilibrium");
    doc["mechanism"] = mech;
    doc["reported"] = profile_json(reported, env);
    doc["matching"] = matching_json(mu, env);
    doc["nash"] = nash_json(v, env);
    out << dump(doc);
  } else {
    out << "mechanism: " << mech << "\nreported:  " << format_profile(reported, env) << "\n";
    out << "matching:  " << format_matching(mu, env) << "\n";
    out << "equilibrium: " << describe_nash(v, env) << "\n";
  }
  return v.equilibrium ? kExitOk : kExitNegative;
}

int cmd_fixtures(const std::vector<std::string>& names, const Settings& s, std::ostream& out) {
  std::vector<std::string> chosen = names.empty() ? fixture_names() : names;
  std::vector<Fixture> fixtures;
  for (const auto& n : chosen) fixtures.push_back(fixture(n));
  bool all = true;
  auto doc = envelope("fixtures");
  auto list = ordered_json::array();
  for (const auto& f : fixtures) {
    const auto results = run_fixture(f, s.scan());
    bool passed = true;
    auto checks = ordered_json::array();
    if (!s.json()) out << f.name << "\n";
    for (const auto& r : results) {
      passed = passed && r.passed;
      checks.push_back({{"label", r.label}, {"expected", r.expected}, {"actual", r.actual}, {"passed", r.passed}});
      if (!s.json()) {
        out << "  " << (r.passed ? "pass" : "FAIL") << "  " << r.label << ": " << r.actual << "\n";
        if (!r.passed) out << "        expected: " << r.expected << "\n";
      }
    }
    all = all && passed;
    list.push_back({{"name", f.name}, {"passed", passed}, {"checks", checks}});
  }
  if (s.json()) {
    doc["fixtures"] = list;
    doc["passed"] = all;
    out << dump(doc);
  } else {
    out << (all ? "all fixtures passed" : "some fixtures FAILED") << "\n";
  }
  return all ? kExitOk : kExitNegative;
}

struct ReformArgs {
  std::string env;
  std::vector<std::string> systems;
};

int cmd_reforms(const ReformArgs& a, const Settings& s, std::ostream& out) {
  const auto files = load_problem_files(a.env);
  std::vector<Environment> envs;
  for (const auto& f : files) envs.push_back(f.environment);
  const auto domain = make_domain(s, files.front());
  // Many rows share a mechanism pair; compute each pair once.
  std::map<std::pair<std::string, std::string>, ReformReport> cache;
  auto doc = envelope("reforms");
  doc["domain"] = domain.describe();
  doc["exhaustive"] = domain.exhaustive();
  auto rows = ordered_json::array();
  std::string scope;
  if (!s.json()) {
    out << "domain: " << domain.describe() << "\n";
    out << "system | year | from -> to | manipulable (printed / computed) | immune (printed / computed)\n";
  }
  for (const auto& rec : reform_table()) {
    if (!a.systems.empty() && std::find(a.systems.begin(), a.systems.end(), rec.system) == a.systems.end()) continue;
    const auto key = std::pair{rec.from, rec.to};
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache.emplace(key, reform_report(envs, rec, domain, files.front().fpf_schools, s.scan())).first;
    }
    const auto& r = it->second;
    scope = r.scope;
    if (s.json()) {
      rows.push_back({{"system", rec.system},
                      {"year", rec.year},
                      {"from", format_mechanism_spec(r.from, &envs.front())},
                      {"to", format_mechanism_spec(r.to, &envs.front())},
                      {"printed_manipulable", rec.printed_manipulable},
                      {"printed_immune", rec.printed_immune},
                      {"computed_manipulable", r.manipulable},
                      {"computed_immune", r.immune}});
    } else {
      out << rec.system << " | " << rec.year << " | " << format_mechanism_spec(r.from, &envs.front()) << " -> "
          << format_mechanism_spec(r.to, &envs.front()) << " | " << rec.printed_manipulable << " / " << r.manipulable
          << " | " << rec.printed_immune << " / " << r.immune << "\n";
    }
  }
  if (s.json()) {
    doc["rows"] = rows;
    doc["scope"] = scope;
    out << dump(doc);
  } else if (!scope.empty()) {
    out << "scope: " << scope << "\n";
  }
  return kExitOk;
}

}  // namespace

CommandResult run_command(const std::vector<std::string>& args) {
  CLI::App app{"matchlab: school-choice mechanisms and strategic-admission audits", "matchlab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "matchlab 1.0");

  Settings settings;
  auto add_global = [&](CLI::App* sub) {
    sub->add_option("--format", settings.format, "Output format")->check(CLI::IsMember({"human", "json"}));
    sub->add_option("--cap", settings.cap, "Mechanism-evaluation cap (default: MATCHLAB_CAP or 10000000)");
    sub->add_option("--seed", settings.seed, "Seed for sampled domains");
    sub->add_option("--max-len", settings.max_len, "Longest enumerated ranking (0: no limit)");
    sub->add_option("--threads", settings.threads, "Worker threads (0: all cores); results do not depend on it");
  };

  MatchArgs match;
  auto* m = app.add_subcommand("match", "Run a mechanism and report the matching and its stability");
  m->add_option("problem", match.file, "Problem file")->required();
  m->add_option("--mech", match.mech, "Mechanism spec, e.g. gs:k=3")->required();
  add_global(m);

  AuditArgs audit;
  auto* au = app.add_subcommand("audit", "Strategy-proof school sets per student");
  au->add_option("problem", audit.file, "Problem or environment file")->required();
  au->add_option("--mech", audit.mech, "Mechanism spec")->required();
  au->add_option("--domain", settings.domain, "full | profile | tiered:a,b/c,d | sampled:N");
  au->add_option("--admission", audit.admission, "Audit a single student:school pair");
  add_global(au);

  CompareArgs compare;
  auto* c = app.add_subcommand("compare", "Compare two mechanisms on one or more environments");
  c->add_option("env", compare.file, "Environment file (object or array)")->required();
  c->add_option("--a", compare.a, "Mechanism A")->required();
  c->add_option("--b", compare.b, "Mechanism B")->required();
  c->add_option("--criterion", compare.criterion, "immunity | manipulability | both")
      ->check(CLI::IsMember({"immunity", "manipulability", "both"}));
  c->add_option("--domain", settings.domain, "full | profile | tiered:a,b/c,d | sampled:N");
  add_global(c);

  EquilibriumArgs eq;
  auto* e = app.add_subcommand("equilibrium", "Nash-equilibrium checks of the preference-revelation game");
  e->add_option("problem", eq.file, "Problem file holding the true preferences")->required();
  e->add_option("--mech", eq.mech, "Mechanism spec")->required();
  auto* rep = e->add_option("--reported", eq.reported, "File with the reported profile (default: truthful)");
  e->add_option("--admission", eq.admission, "Audit student:school admission in equilibrium")->excludes(rep);
  e->add_option("--domain", settings.domain, "full | profile | tiered:a,b/c,d | sampled:N");
  add_global(e);

  std::vector<std::string> fixture_list;
  auto* fx = app.add_subcommand("fixtures", "Run the golden fixture suite");
  fx->add_option("names", fixture_list, "Fixture names (default: all)");
  add_global(fx);

  ReformArgs reforms;
  auto* rf = app.add_subcommand("reforms", "Recompute the reform table on small environments");
  rf->add_option("--env", reforms.env, "Environment file (object or array)")->required();
  rf->add_option("--system", reforms.systems, "Only rows for this system (repeatable)");
  rf->add_option("--domain", settings.domain, "full | profile | tiered:a,b/c,d | sampled:N");
  add_global(rf);

  std::ostringstream out, err;
  CommandResult result;
  std::vector<const char*> argv{"matchlab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    result.exit_code = code == 0 ? kExitOk : kExitUsage;
    result.out = out.str();
    result.err = err.str();
    return result;
  }

  try {
    if (*m) {
      result.exit_code = cmd_match(match, settings, out);
    } else if (*au) {
      result.exit_code = cmd_audit(audit, settings, out);
    } else if (*c) {
      result.exit_code = cmd_compare(compare, settings, out);
    } else if (*e) {
      result.exit_code = cmd_equilibrium(eq, settings, out);
    } else if (*fx) {
      result.exit_code = cmd_fixtures(fixture_list, settings, out);
    } else if (*rf) {
      result.exit_code = cmd_reforms(reforms, settings, out);
    }
  } catch (const SizeCapExceeded& ex) {
    err << "error: " << ex.what() << " (raise it with --cap or MATCHLAB_CAP)\n";
    result.exit_code = kExitCap;
    out.str("");
  } catch (const ParseError& ex) {
    err << "error: " << ex.what();
    if (ex.line()) err << " (line " << ex.line() << ")";
    if (!ex.field().empty()) err << " [field " << ex.field() << "]";
    err << "\n";
    result.exit_code = kExitUsage;
    out.str("");
  } catch (const Error& ex) {
    err << "error: " << ex.what() << "\n";
    result.exit_code = kExitUsage;
    out.str("");
  }
  result.out = out.str();
  result.err = err.str();
  return result;
}

}  // namespace matchlab
