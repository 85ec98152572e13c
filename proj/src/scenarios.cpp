// SPDX-License-Identifier: Apache-2.0
#include "matchlab/scenarios.hpp"

#include <algorithm>
#include <map>

#include "matchlab/errors.hpp"

namespace matchlab {

namespace {

PriorityOrder order(std::initializer_list<std::uint32_t> students) {
  PriorityOrder o;
  for (auto s : students) o.push_back(StudentId{s});
  return o;
}

// Listed students first, then everyone else by index.
PriorityOrder order_with_rest(std::initializer_list<std::uint32_t> top, std::size_t n) {
  PriorityOrder o = order(top);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (std::none_of(o.begin(), o.end(), [&](StudentId s) { return s.value == i; })) o.push_back(StudentId{i});
  }
  return o;
}

std::string run_matching(const MechanismSpec& spec, const Environment& env, const PreferenceProfile& profile) {
  return format_matching(apply_mechanism(spec, Problem{env, profile}), env);
}

std::string verdict_word(bool sp) { return sp ? "SP" : "NotSP"; }
std::string eq_word(bool sp) { return sp ? "SP-in-eq" : "NotSP-in-eq"; }

Fixture ps13() {
  Fixture f;
  f.name = "ps13-counterexample";
  f.description = "Seven students and seven schools with one seat each; s5 is first-preference-first. "
                  "P is vulnerable under GS^3 (student 1 gains s4 by listing only s4) but not under FPF^3.";
  auto& env = f.problem.environment;
  env = Environment::common(7, 7, 1);
  env.priorities = {order_with_rest({1}, 7),       order_with_rest({2}, 7), order_with_rest({3}, 7),
                    order_with_rest({6, 0, 5}, 7), order_with_rest({5, 4}, 7), order_with_rest({5, 6}, 7),
                    order_with_rest({4}, 7)};
  const PreferenceProfile truth = {{0, 1, 2, 3}, {0}, {1}, {2}, {4, 6}, {3, 4, 5}, {5, 3}};
  f.problem.profile = truth;
  f.problem.fpf_schools = {SchoolId{4}};
  f.domain = PreferenceDomain::explicit_profile(truth).with_full_misreports(3);
  const auto gs3 = MechanismSpec::gs(3);
  const auto fpf3 = MechanismSpec::fpf({SchoolId{4}}, 3);
  f.specs = {gs3, fpf3};
  auto deviated = truth;
  deviated[0] = Preference{3};

  f.checks.push_back({"GS^3(P)", "{1:∅, 2:s1, 3:s2, 4:s3, 5:s5, 6:s4, 7:s6}",
                      [=](const ScanOptions&) { return run_matching(gs3, env, truth); }});
  f.checks.push_back({"FPF^3(P)", "{1:∅, 2:s1, 3:s2, 4:s3, 5:s5, 6:s4, 7:s6}",
                      [=](const ScanOptions&) { return run_matching(fpf3, env, truth); }});
  f.checks.push_back({"GS^3(P1^s4, P-1)", "{1:s4, 2:s1, 3:s2, 4:s3, 5:s7, 6:s5, 7:s6}",
                      [=](const ScanOptions&) { return run_matching(gs3, env, deviated); }});
  f.checks.push_back({"FPF^3(P1^s4, P-1)", "{1:∅, 2:s1, 3:s2, 4:s3, 5:s5, 6:s6, 7:s4}",
                      [=](const ScanOptions&) { return run_matching(fpf3, env, deviated); }});
  f.checks.push_back({"adjusted priority at s5 under P1^s4, top two", "5 6", [=](const ScanOptions&) {
                        const std::vector<SchoolId> fpf{SchoolId{4}};
                        auto adjusted = adjust_priorities_fpf(truncate(deviated, 3), env, fpf);
                        const auto& o = adjusted.priorities[4];
                        return env.student_label(o[0]) + " " + env.student_label(o[1]);
                      }});
  const auto domain = f.domain;
  f.checks.push_back({"is_vulnerable under GS^3 (misreports of length <= 3)", "1 reports s4: ∅ -> s4",
                      [=](const ScanOptions&) {
                        return describe_witness(is_vulnerable(gs3, Problem{env, truth}, domain), env);
                      }});
  f.checks.push_back({"is_vulnerable under FPF^3 (misreports of length <= 3)", "none", [=](const ScanOptions&) {
                        return describe_witness(is_vulnerable(fpf3, Problem{env, truth}, domain), env);
                      }});
  return f;
}

Fixture boston_equilibrium() {
  Fixture f;
  f.name = "boston-equilibrium";
  f.description = "Three students with identical preferences s1 s2 s3 and priority j, k, i everywhere. "
                  "Listing s2 first wins i a seat at s2, but k is then not best-responding.";
  auto& env = f.problem.environment;
  env = Environment::common(3, 3, 1);
  env.student_labels = {"i", "j", "k"};
  for (auto& p : env.priorities) p = order({1, 2, 0});
  const PreferenceProfile truth = {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}};
  f.problem.profile = truth;
  f.domain = PreferenceDomain::full();
  const auto boston = MechanismSpec::boston();
  f.specs = {boston};
  auto reported = truth;
  reported[0] = Preference{1, 0, 2};

  f.checks.push_back({"β(P)", "{i:s3, j:s1, k:s2}", [=](const ScanOptions&) { return run_matching(boston, env, truth); }});
  f.checks.push_back({"β(P_i^s2, P-i)", "{i:s2, j:s1, k:s3}",
                      [=](const ScanOptions&) { return run_matching(boston, env, reported); }});
  const auto domain = f.domain;
  f.checks.push_back({"Nash equilibrium check of (P_i^s2, P-i) in the game (P, β)", "not NE: k reports s2: s3 -> s2",
                      [=](const ScanOptions&) {
                        return describe_nash(is_nash_equilibrium(boston, truth, reported, env, domain), env);
                      }});
  return f;
}

Fixture chinese_e2_vs_e1() {
  Fixture f;
  f.name = "chinese-e2-vs-e1";
  f.description = "Five students and four schools with one seat each. (P'_i, P*_-i) is an equilibrium of "
                  "(P*, Ch^(2)) that wins i a seat at s1, so admission to s1 is not strategy-proof to i via "
                  "Ch^(2) in equilibrium, while it is via Ch^(1).";
  auto& env = f.problem.environment;
  env = Environment::common(5, 4, 1);
  env.student_labels = {"i", "j", "k", "m", "t"};
  env.priorities = {order({2, 3, 1, 4, 0}), order_with_rest({0, 2}, 5), order_with_rest({1}, 5),
                    order_with_rest({4}, 5)};
  const PreferenceProfile truth = {{2, 3, 0, 1}, {2, 1}, {1, 0}, {1, 2, 0}, {3}};
  f.problem.profile = truth;
  f.domain = PreferenceDomain::full().with_cap(2'000'000'000);
  const auto ch2 = MechanismSpec::chinese(2);
  const auto ch1 = MechanismSpec::chinese(1);
  f.specs = {ch2, ch1};
  auto reported = truth;
  reported[0] = Preference{0, 1};
  auto both = reported;
  both[3] = Preference{0, 1, 2};
  const auto domain = f.domain;

  f.checks.push_back({"Ch^(2)(P*)", "{i:∅, j:s3, k:s2, m:s1, t:s4}",
                      [=](const ScanOptions&) { return run_matching(ch2, env, truth); }});
  f.checks.push_back({"Ch^(2)(P'_i, P*-i)", "{i:s1, j:s3, k:s2, m:∅, t:s4}",
                      [=](const ScanOptions&) { return run_matching(ch2, env, reported); }});
  f.checks.push_back({"Ch^(2)(P'_i, P'_m, P*-{i,m}) with P'_m = s1 s2 s3", "{i:s2, j:s3, k:s1, m:∅, t:s4}",
                      [=](const ScanOptions&) { return run_matching(ch2, env, both); }});
  f.checks.push_back({"(P'_i, P*-i) is a Nash equilibrium of (P*, Ch^(2))", "NE", [=](const ScanOptions&) {
                        return describe_nash(is_nash_equilibrium(ch2, truth, reported, env, domain), env);
                      }});
  f.checks.push_back({"admission to s1 for i via Ch^(2), in equilibrium", "NotSP-in-eq", [=](const ScanOptions& o) {
                        return eq_word(strategyproof_admission_in_equilibrium(ch2, env, StudentId{0}, SchoolId{0},
                                                                              domain, o)
                                           .strategyproof);
                      }});
  f.checks.push_back({"admission to s1 for i via Ch^(1), in equilibrium", "SP-in-eq", [=](const ScanOptions& o) {
                        return eq_word(strategyproof_admission_in_equilibrium(ch1, env, StudentId{0}, SchoolId{0},
                                                                              domain, o)
                                           .strategyproof);
                      }});
  return f;
}

Fixture thm1_strict_env() {
  Fixture f;
  f.name = "thm1-strict-env";
  f.description = "Common priority i, j, m with one seat per school; s1 is first-preference-first. "
                  "Admission to s1 is strategy-proof to j via GS^2 but not via FPF^2.";
  auto& env = f.problem.environment;
  env = Environment::common(3, 2, 1);
  env.student_labels = {"i", "j", "m"};
  const PreferenceProfile truth = {{1, 0}, {1, 0}, {0, 1}};
  f.problem.profile = truth;
  f.problem.fpf_schools = {SchoolId{0}};
  f.domain = PreferenceDomain::full();
  const auto gs2 = MechanismSpec::gs(2);
  const auto fpf2 = MechanismSpec::fpf({SchoolId{0}}, 2);
  f.specs = {gs2, fpf2};
  auto deviated = truth;
  deviated[1] = Preference{0};
  const auto domain = f.domain;

  f.checks.push_back({"FPF^2(P)", "{i:s2, j:∅, m:s1}", [=](const ScanOptions&) { return run_matching(fpf2, env, truth); }});
  f.checks.push_back({"FPF^2(P_j^s1, P-j)", "{i:s2, j:s1, m:∅}",
                      [=](const ScanOptions&) { return run_matching(fpf2, env, deviated); }});
  f.checks.push_back({"admission to s1 for j via GS^2", "SP", [=](const ScanOptions& o) {
                        return verdict_word(strategyproof_admission(gs2, env, StudentId{1}, SchoolId{0}, domain, o).strategyproof);
                      }});
  f.checks.push_back({"admission to s1 for j via FPF^2", "NotSP", [=](const ScanOptions& o) {
                        return verdict_word(strategyproof_admission(fpf2, env, StudentId{1}, SchoolId{0}, domain, o).strategyproof);
                      }});
  f.checks.push_back({"immunity of GS^2 (A) against FPF^2 (B)", "More", [=](const ScanOptions& o) {
                        return immunity_word(compare_immunity(gs2, fpf2, {env}, domain, o).verdict);
                      }});
  return f;
}

Fixture thm2_strict_env() {
  Fixture f;
  f.name = "thm2-strict-env";
  f.description = "Four students, three schools, one seat each, common priority 1 > 2 > 3 > 4. "
                  "Student 2 is safe from strategic admissions under GS^2 and Ch^(2) but not under GS^1 and Ch^(1).";
  auto& env = f.problem.environment;
  env = Environment::common(4, 3, 1);
  f.domain = PreferenceDomain::full();
  const auto gs2 = MechanismSpec::gs(2);
  const auto gs1 = MechanismSpec::gs(1);
  const auto ch2 = MechanismSpec::chinese(2);
  const auto ch1 = MechanismSpec::chinese(1);
  f.specs = {gs2, gs1, ch2, ch1};
  const auto domain = f.domain;
  for (const auto& [label, spec, expected] :
       {std::tuple{"SP school sets via GS^2", gs2, "1:{s1,s2,s3} 2:{s1,s2,s3} 3:{} 4:{}"},
        std::tuple{"SP school sets via GS^1", gs1, "1:{s1,s2,s3} 2:{} 3:{} 4:{}"},
        std::tuple{"SP school sets via Ch^(2)", ch2, "1:{s1,s2,s3} 2:{s1,s2,s3} 3:{} 4:{}"},
        std::tuple{"SP school sets via Ch^(1)", ch1, "1:{s1,s2,s3} 2:{} 3:{} 4:{}"}}) {
    f.checks.push_back({label, expected, [=, spec = spec](const ScanOptions& o) {
                          return describe_school_sets(strategyproof_school_sets(spec, env, domain, o), env);
                        }});
  }
  f.checks.push_back({"immunity of GS^2 (A) against GS^1 (B)", "More", [=](const ScanOptions& o) {
                        return immunity_word(compare_immunity(gs2, gs1, {env}, domain, o).verdict);
                      }});
  f.checks.push_back({"immunity of Ch^(2) (A) against Ch^(1) (B)", "More", [=](const ScanOptions& o) {
                        return immunity_word(compare_immunity(ch2, ch1, {env}, domain, o).verdict);
                      }});
  return f;
}

Fixture tier_sd() {
  Fixture f;
  f.name = "tier-sd";
  f.description = "Desk-scale Chicago: five students, tiers {s1,s2} over {s3,s4}, one seat each, common "
                  "priority. Every tier profile is vulnerable under SD^2, yet admission to the elite tier is "
                  "strategy-proof to more students as the list grows.";
  auto model = chicago_model(5, {2, 2}, 1, {1, 2, 3});
  auto& env = f.problem.environment;
  env = model.environment;
  f.domain = model.domain;
  const auto sd2 = MechanismSpec::sd(2);
  const auto sd3 = MechanismSpec::sd(3);
  const auto b1 = MechanismSpec::boston(1);
  f.specs = {b1, sd2, sd3};
  const auto domain = f.domain;
  const auto elite = model.tiers.front();
  PreferenceProfile truthful(5, Preference{0, 1, 2, 3});
  f.problem.profile = truthful;

  f.checks.push_back({"SD^2 at the profile where all report s1 s2 s3 s4", "{1:s1, 2:s2, 3:∅, 4:∅, 5:∅}",
                      [=](const ScanOptions&) { return run_matching(sd2, env, truthful); }});
  f.checks.push_back({"is_vulnerable under SD^2 at that profile", "3 reports s3: ∅ -> s3", [=](const ScanOptions&) {
                        return describe_witness(is_vulnerable(sd2, Problem{env, truthful}, domain), env);
                      }});
  f.checks.push_back({"tier profiles vulnerable under SD^2", "1024 of 1024", [=](const ScanOptions& o) {
                        auto r = compare_manipulability(sd2, sd2, {env}, domain, o);
                        const auto& e = r.environments.front();
                        return std::to_string(e.vulnerable_a) + " of " + std::to_string(e.profiles);
                      }});
  f.checks.push_back({"SP school sets via SD^2 (unrestricted preferences)", "1:{s1,s2,s3,s4} 2:{s1,s2,s3,s4} 3:{} 4:{} 5:{}",
                      [=](const ScanOptions& o) {
                        return describe_school_sets(strategyproof_school_sets(sd2, env, PreferenceDomain::full(), o), env);
                      }});
  f.checks.push_back({"elite-tier SP share β^1, SD^2, SD^3 (tier domain)", "1/5 5/5 5/5", [=](const ScanOptions& o) {
                        std::string out;
                        for (const auto& spec : {b1, sd2, sd3}) {
                          auto [c, t] = tier_strategyproof_share(strategyproof_school_sets(spec, env, domain, o), elite);
                          out += (out.empty() ? "" : " ") + std::to_string(c) + "/" + std::to_string(t);
                        }
                        return out;
                      }});
  f.checks.push_back({"q-hat for k = 2", "2", [=](const ScanOptions&) { return std::to_string(sd_guarantee(env, 2)); }});
  return f;
}

}  // namespace

const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names{"ps13-counterexample", "boston-equilibrium", "chinese-e2-vs-e1",
                                              "thm1-strict-env",     "thm2-strict-env",    "tier-sd"};
  return names;
}

Fixture fixture(std::string_view name) {
  if (name == "ps13-counterexample") return ps13();
  if (name == "boston-equilibrium") return boston_equilibrium();
  if (name == "chinese-e2-vs-e1") return chinese_e2_vs_e1();
  if (name == "thm1-strict-env") return thm1_strict_env();
  if (name == "thm2-strict-env") return thm2_strict_env();
  if (name == "tier-sd") return tier_sd();
  throw UnknownFixture(std::string(name));
}

std::vector<CheckResult> run_fixture(const Fixture& f, const ScanOptions& options) {
  std::vector<CheckResult> out;
  for (const auto& c : f.checks) {
    CheckResult r{c.label, c.expected, {}, false};
    try {
      r.actual = c.evaluate(options);
    } catch (const Error& e) {
      r.actual = std::string("error: ") + e.what();
    }
    r.passed = r.actual == r.expected;
    out.push_back(std::move(r));
  }
  return out;
}

std::string describe_witness(const std::optional<ManipulationWitness>& w, const Environment& env) {
  if (!w) return "none";
  return env.student_label(w->student) + " reports " + format_preference(w->misreport, env) + ": " +
         format_outcome(w->truthful_outcome, env) + " -> " + format_outcome(w->deviating_outcome, env);
}

std::string describe_nash(const NashVerdict& v, const Environment& env) {
  if (v.equilibrium) return "NE";
  return "not NE: " + env.student_label(*v.deviator) + " reports " + format_preference(*v.deviation, env) + ": " +
         format_outcome(v.current, env) + " -> " + format_outcome(v.improved, env);
}

std::string describe_school_sets(const SchoolSets& sets, const Environment& env) {
  std::string out;
  for (std::uint32_t i = 0; i < sets.sp.size(); ++i) {
    if (i) out += " ";
    out += env.student_label(StudentId{i}) + ":{";
    bool first = true;
    for (auto s : sets.schools_of(StudentId{i})) {
      out += (first ? "" : ",") + env.school_label(s);
      first = false;
    }
    out += "}";
  }
  return out;
}

ChicagoModel chicago_model(std::size_t n_students, const std::vector<std::size_t>& tier_sizes,
                           std::uint32_t seats_per_school, const std::vector<std::size_t>& constraints) {
  std::size_t m = 0;
  for (auto t : tier_sizes) {
    if (t == 0) throw InvalidArgument("tiers must be non-empty");
    m += t;
  }
  if (m == 0) throw InvalidArgument("at least one school is needed");
  if (seats_per_school == 0) throw InvalidArgument("seats per school must be >= 1");
  ChicagoModel model;
  model.environment = Environment::common(n_students, m, seats_per_school);
  if (m == 10) {
    model.environment.school_labels = {"Payton", "Northside", "Lane", "Young", "Jones",
                                       "Brooks", "Lindblom", "Westinghouse", "King", "South Shore"};
  }
  std::uint32_t next = 0;
  for (auto t : tier_sizes) {
    std::vector<SchoolId> tier;
    for (std::size_t k = 0; k < t; ++k) tier.push_back(SchoolId{next++});
    model.tiers.push_back(std::move(tier));
  }
  // Students may misreport outside the tier structure.
  model.domain = PreferenceDomain::tiered(model.tiers).with_full_misreports();
  for (auto k : constraints) model.guarantees.emplace_back(k, sd_guarantee(model.environment, std::min(k, m)));
  return model;
}

std::pair<std::size_t, std::size_t> tier_strategyproof_share(const SchoolSets& sets, const std::vector<SchoolId>& tier) {
  std::size_t count = 0;
  for (const auto& row : sets.sp) {
    count += std::all_of(tier.begin(), tier.end(), [&](SchoolId s) { return row[s.value]; });
  }
  return {count, sets.sp.size()};
}

const std::vector<ReformRecord>& reform_table() {
  static const std::vector<ReformRecord> rows = [] {
    std::vector<ReformRecord> r{
        {"Boston Public School (K, 6, 9)", 2005, "boston", "gs", "Less", "More"},
        {"Chicago Selective High Schools", 2009, "boston:k=4", "sd:k=4", "Less", "More"},
        {"Chicago Selective High Schools", 2010, "sd:k=4", "sd:k=6", "Less", "More"},
        {"Ghana Secondary schools", 2007, "gs:k=3", "gs:k=4", "Less", "More"},
        {"Ghana Secondary schools", 2008, "gs:k=4", "gs:k=6", "Less", "More"},
        {"Denver Public Schools", 2012, "boston:k=2", "gs:k=5", "Less", "More"},
        {"Seattle Public Schools", 1999, "boston", "gs", "Less", "More"},
        {"Seattle Public Schools", 2009, "gs", "boston", "More", "Less"},
    };
    auto fpf_gs = [&](const char* name, int year, int k_from, int k_to) {
      r.push_back({name, year, "fpf:k=" + std::to_string(k_from), "gs:k=" + std::to_string(k_to), "Not comparable",
                   "More"});
    };
    auto boston_gs = [&](const char* name, int year, int k_from, int k_to) {
      r.push_back({name, year, "boston:k=" + std::to_string(k_from), "gs:k=" + std::to_string(k_to), "Less", "More"});
    };
    fpf_gs("Bath and North East Somerset", 2007, 3, 3);
    fpf_gs("Bedford and Bedfordshire", 2007, 3, 3);
    fpf_gs("Blackburn with Darwen", 2007, 3, 3);
    fpf_gs("Blackpool", 2007, 3, 3);
    fpf_gs("Bolton", 2007, 3, 3);
    fpf_gs("Bradford", 2007, 3, 3);
    boston_gs("Brighton and Hove", 2007, 3, 3);
    fpf_gs("Calderdale", 2006, 3, 3);
    fpf_gs("Cornwall", 2007, 3, 3);
    fpf_gs("Cumbria", 2007, 3, 3);
    fpf_gs("Darlington", 2007, 3, 3);
    fpf_gs("Derby", 2005, 4, 4);
    fpf_gs("Devon", 2006, 3, 3);
    fpf_gs("Durham", 2007, 3, 3);
    fpf_gs("Ealing", 2006, 6, 6);
    boston_gs("East Sussex", 2007, 3, 3);
    fpf_gs("Gateshead", 2007, 3, 3);
    fpf_gs("Halton", 2007, 3, 3);
    fpf_gs("Hampshire", 2007, 3, 3);
    fpf_gs("Hartlepool", 2007, 3, 3);
    fpf_gs("Isle of Wright", 2007, 3, 3);
    boston_gs("Kent", 2007, 3, 4);
    fpf_gs("Kingston upon Thames", 2007, 3, 4);
    fpf_gs("Knowsley", 2007, 3, 3);
    fpf_gs("Lancashire", 2007, 3, 3);
    fpf_gs("Lincolnshire", 2007, 3, 3);
    fpf_gs("Luton", 2007, 3, 3);
    fpf_gs("Manchester", 2007, 3, 3);
    fpf_gs("Merton", 2006, 6, 6);
    boston_gs("Newcastle", 2005, 3, 3);
    r.push_back({"Newcastle", 2010, "gs:k=3", "gs:k=4", "Less", "More"});
    fpf_gs("North Lincolnshire", 2007, 3, 3);
    fpf_gs("North Somerset", 2007, 3, 3);
    fpf_gs("North Tyneside", 2007, 3, 3);
    fpf_gs("Oldham", 2007, 3, 3);
    fpf_gs("Peterborough", 2007, 3, 3);
    fpf_gs("Plymouth", 2007, 3, 3);
    fpf_gs("Poole", 2007, 3, 3);
    fpf_gs("Portsmouth", 2007, 3, 3);
    fpf_gs("Richmond", 2005, 6, 6);
    boston_gs("Sefton primary", 2007, 3, 3);
    fpf_gs("Sefton secondary", 2007, 3, 3);
    fpf_gs("Slough", 2006, 3, 3);
    fpf_gs("Somerset", 2007, 3, 3);
    fpf_gs("South Gloucestershire", 2007, 3, 3);
    fpf_gs("South Tyneside", 2007, 3, 3);
    fpf_gs("Southhampton", 2007, 3, 3);
    fpf_gs("Stockton", 2007, 3, 3);
    fpf_gs("Stoke-on-Trent", 2007, 3, 3);
    fpf_gs("Suffolk", 2007, 3, 3);
    fpf_gs("Sunderland", 2007, 3, 3);
    fpf_gs("Surrey", 2007, 3, 3);
    r.push_back({"Surrey", 2010, "gs:k=3", "gs:k=6", "Less", "More"});
    fpf_gs("Sutton", 2006, 6, 6);
    fpf_gs("Swindon", 2007, 3, 3);
    fpf_gs("Tameside", 2007, 3, 3);
    fpf_gs("Telford and Wrekin", 2007, 3, 3);
    fpf_gs("Torbay", 2007, 3, 3);
    fpf_gs("Warrington", 2007, 3, 3);
    fpf_gs("Warwickshire", 2007, 7, 7);
    fpf_gs("Wilgan", 2007, 3, 3);
    fpf_gs("Wrexham County Borough", 2011, 3, 3);
    return r;
  }();
  return rows;
}

std::string immunity_word(ImmunityVerdict v) {
  switch (v) {
    case ImmunityVerdict::AMoreImmune: return "More";
    case ImmunityVerdict::BMoreImmune: return "Less";
    case ImmunityVerdict::Equal: return "Equal";
    case ImmunityVerdict::Incomparable: return "Not comparable";
  }
  return "";
}

std::string manipulability_word(ManipulabilityVerdict v) {
  switch (v) {
    case ManipulabilityVerdict::ALess: return "Less";
    case ManipulabilityVerdict::BLess: return "More";
    case ManipulabilityVerdict::Equal: return "Equal";
    case ManipulabilityVerdict::Incomparable: return "Not comparable";
  }
  return "";
}

ReformReport reform_report(const std::vector<Environment>& envs, const ReformRecord& record,
                           const PreferenceDomain& domain, const std::vector<SchoolId>& fpf_schools,
                           const ScanOptions& options) {
  ReformReport report;
  report.record = record;
  const Environment* labels = envs.empty() ? nullptr : &envs.front();
  report.from = parse_mechanism_spec(record.from, labels);
  report.to = parse_mechanism_spec(record.to, labels);
  for (auto* spec : {&report.from, &report.to}) {
    if (spec->family == Family::FirstPreferenceFirst && spec->fpf_schools.empty()) spec->fpf_schools = fpf_schools;
  }
  report.immunity = compare_immunity(report.to, report.from, envs, domain, options);
  report.manipulability = compare_manipulability(report.to, report.from, envs, domain, options);
  report.immune = immunity_word(report.immunity.verdict);
  report.manipulable = manipulability_word(report.manipulability.verdict);
  report.scope = report.immunity.scope;
  return report;
}

}  // namespace matchlab
