// SPDX-License-Identifier: Apache-2.0
// One line per acceptance criterion; exit status is the number of failures.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "matchlab/analysis.hpp"
#include "matchlab/cli.hpp"
#include "matchlab/domain.hpp"
#include "matchlab/io.hpp"
#include "matchlab/mechanisms.hpp"
#include "matchlab/scenarios.hpp"

using namespace matchlab;

namespace {

struct Result {
  bool pass = true;
  std::string detail;
};

void fail(Result& o, const std::string& why) {
  if (o.pass) o.detail.clear();
  o.pass = false;
  o.detail += (o.detail.empty() ? "" : "; ") + why;
}

// Runs every check of a fixture whose label passes `keep`.
void fixture_checks(Result& o, const std::string& name, const std::function<bool(const std::string&)>& keep,
                    std::size_t& count) {
  const auto f = fixture(name);
  for (const auto& c : f.checks) {
    if (!keep(c.label)) continue;
    ++count;
    const auto actual = c.evaluate({});
    if (actual != c.expected) fail(o, c.label + ": got " + actual + ", want " + c.expected);
  }
}

void for_each_profile(const std::vector<Preference>& lists, std::size_t n,
                      const std::function<void(const PreferenceProfile&)>& f) {
  PreferenceProfile p(n);
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) p[i] = lists[idx[i]];
    f(p);
    std::size_t i = 0;
    while (i < n && ++idx[i] == lists.size()) idx[i++] = 0;
    if (i == n) return;
  }
}

std::vector<PriorityOrder> all_orders(std::size_t n) {
  PriorityOrder o;
  for (std::uint32_t i = 0; i < n; ++i) o.push_back(StudentId{i});
  std::vector<PriorityOrder> out;
  do out.push_back(o);
  while (std::next_permutation(o.begin(), o.end(), [](StudentId a, StudentId b) { return a.value < b.value; }));
  return out;
}

// Every priority structure with unit seats, up to relabelling students:
// the first school's order is fixed to 1 > 2 > ... > n.
std::vector<Environment> unit_environments(std::size_t n, std::size_t m) {
  const auto orders = all_orders(n);
  std::vector<Environment> out;
  std::vector<std::size_t> idx(m, 0);
  while (true) {
    auto env = Environment::common(n, m, 1);
    for (std::size_t s = 1; s < m; ++s) env.priorities[s] = orders[idx[s]];
    out.push_back(std::move(env));
    std::size_t s = 1;
    while (s < m && ++idx[s] == orders.size()) idx[s++] = 0;
    if (s == m) return out;
  }
}

Result ac1() {
  Result o;
  std::size_t n = 0;
  fixture_checks(o, "ps13-counterexample", [](const std::string&) { return true; }, n);
  if (o.pass) o.detail = std::to_string(n) + " checks";
  return o;
}

Result ac2() {
  Result o;
  std::size_t n = 0;
  fixture_checks(o, "boston-equilibrium", [](const std::string&) { return true; }, n);
  if (o.pass) o.detail = std::to_string(n) + " checks, deviator k";
  return o;
}

Result ac3() {
  Result o;
  std::size_t n = 0;
  const auto t0 = std::chrono::steady_clock::now();
  fixture_checks(o, "chinese-e2-vs-e1", [](const std::string&) { return true; }, n);
  const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char buf[64];
  std::snprintf(buf, sizeof buf, ", audits took %.1f s", secs);
  if (o.pass) o.detail = std::to_string(n) + " checks" + buf;
  if (secs > 600) fail(o, "over ten minutes");
  return o;
}

Result ac4() {
  Result o;
  const auto env = Environment::common(3, 2);
  const auto gs = MechanismSpec::gs();
  const auto domain = PreferenceDomain::full();
  std::size_t profiles = 0, vulnerable = 0;
  // non-common priorities too: every order at the second school
  for (const auto& order : all_orders(3)) {
    auto e = env;
    e.priorities[1] = order;
    for_each_profile(enumerate_preferences(2), 3, [&](const PreferenceProfile& p) {
      ++profiles;
      vulnerable += is_vulnerable(gs, Problem{e, p}, domain).has_value();
    });
  }
  o.detail = std::to_string(vulnerable) + " vulnerable of " + std::to_string(profiles) + " profiles";
  if (vulnerable != 0 || profiles != 6 * 125) fail(o, o.detail);
  return o;
}

Result ac5() {
  Result o;
  const auto env = Environment::common(4, 3);
  std::size_t profiles = 0, agree = 0, vulnerable = 0;
  for_each_profile(enumerate_preferences(3), 4, [&](const PreferenceProfile& p) {
    ++profiles;
    const auto c = sd_vulnerability_characterization(Problem{env, p}, 2);
    agree += c.agrees;
    vulnerable += !c.left;
  });
  o.detail = std::to_string(agree) + " of " + std::to_string(profiles) + " agree (" + std::to_string(vulnerable) +
             " vulnerable)";
  if (agree != profiles || profiles != 65536) fail(o, o.detail);
  return o;
}

Result ac6() {
  Result o;
  const auto desk = chicago_model(5, {2, 2}, 1, {2});
  const auto sets = strategyproof_school_sets(MechanismSpec::sd(2), desk.environment, PreferenceDomain::full());
  const auto q_hat = desk.guarantees.front().second;
  for (std::uint32_t i = 0; i < 5; ++i) {
    for (std::uint32_t s = 0; s < 4; ++s) {
      if (sets.sp[i][s] != (i < q_hat)) fail(o, "student " + std::to_string(i + 1) + " at s" + std::to_string(s + 1));
    }
  }
  const auto full = chicago_model(10000, {5, 5}, 400, {4, 6});
  const auto g4 = full.guarantees[0].second, g6 = full.guarantees[1].second;
  if (g4 != 1600 || g6 != 2400) fail(o, "q-hat " + std::to_string(g4) + "/" + std::to_string(g6));
  if (o.pass) o.detail = "SP exactly for students 1.." + std::to_string(q_hat) + "; q-hat 1600/2400";
  return o;
}

Result ac7() {
  Result o;
  const auto d = PreferenceDomain::full();
  struct Pair {
    const char* name;
    MechanismSpec a, b;  // SP sets of b must sit inside those of a
  };
  const std::vector<Pair> pairs{{"GS^2 vs FPF^2", MechanismSpec::gs(2), MechanismSpec::fpf({SchoolId{0}}, 2)},
                                {"GS^2 vs GS^1", MechanismSpec::gs(2), MechanismSpec::gs(1)},
                                {"Ch^(2) vs Ch^(1)", MechanismSpec::chinese(2), MechanismSpec::chinese(1)}};
  const auto envs = unit_environments(4, 3);
  std::vector<std::size_t> strict(pairs.size(), 0);
  for (const auto& env : envs) {
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto v = compare_immunity(pairs[k].a, pairs[k].b, {env}, d).verdict;
      if (v == ImmunityVerdict::BMoreImmune || v == ImmunityVerdict::Incomparable) fail(o, pairs[k].name);
      strict[k] += v == ImmunityVerdict::AMoreImmune;
    }
  }
  std::size_t n = 0;
  fixture_checks(o, "thm1-strict-env", [](const std::string& l) { return l.find("immunity") != std::string::npos; }, n);
  fixture_checks(o, "thm2-strict-env", [](const std::string& l) { return l.find("immunity") != std::string::npos; }, n);
  if (n != 3) fail(o, "strict-witness checks missing");
  if (o.pass) {
    o.detail = std::to_string(envs.size()) + " environments; strict in";
    for (std::size_t k = 0; k < pairs.size(); ++k)
      o.detail += std::string(k ? "," : "") + " " + std::to_string(strict[k]) + " (" + pairs[k].name + ")";
  }
  return o;
}

Result ac8() {
  Result o;
  std::size_t n = 0;
  fixture_checks(
      o, "tier-sd",
      [](const std::string& l) { return l.find("tier profiles") != std::string::npos || l.find("share") != std::string::npos; },
      n);
  // The frozen shares are 1/5 5/5 5/5; check monotonicity directly too.
  const auto model = chicago_model(5, {2, 2}, 1, {2, 3});
  std::size_t last = 0;
  std::string shares;
  for (const auto& spec : {MechanismSpec::boston(1), MechanismSpec::sd(2), MechanismSpec::sd(3)}) {
    const auto [c, t] = tier_strategyproof_share(strategyproof_school_sets(spec, model.environment, model.domain),
                                                 model.tiers.front());
    if (c < last) fail(o, "share drops");
    last = c;
    shares += (shares.empty() ? "" : " ") + std::to_string(c) + "/" + std::to_string(t);
  }
  if (o.pass) o.detail = "1024 of 1024 vulnerable; elite SP shares " + shares;
  return o;
}

Result ac9() {
  Result o;
  std::size_t compared = 0;
  for (std::size_t m : {2u, 3u}) {
    std::vector<SchoolId> every;
    for (std::uint32_t s = 0; s < m; ++s) every.push_back(SchoolId{s});
    const auto lists = enumerate_preferences(m);
    for (const auto& env : unit_environments(3, m)) {
      bool common = std::all_of(env.priorities.begin(), env.priorities.end(),
                                [&](const PriorityOrder& p) { return p == env.priorities.front(); });
      std::vector<std::pair<MechanismSpec, MechanismSpec>> eq{
          {MechanismSpec::fpf({}), MechanismSpec::gs()},
          {MechanismSpec::fpf(every), MechanismSpec::boston()},
          {MechanismSpec::chinese(1), MechanismSpec::boston()},
          {MechanismSpec::chinese(m), MechanismSpec::gs()},
          {MechanismSpec::chinese(m + 1), MechanismSpec::gs()},
          {MechanismSpec::gs(m), MechanismSpec::gs()},
          {MechanismSpec::boston(m), MechanismSpec::boston()},
          {MechanismSpec::fpf({SchoolId{0}}, m), MechanismSpec::fpf({SchoolId{0}})},
          {MechanismSpec::chinese(1, m), MechanismSpec::chinese(1)}};
      if (common) {
        eq.push_back({MechanismSpec::sd(), MechanismSpec::gs()});
        eq.push_back({MechanismSpec::sd(m), MechanismSpec::sd()});
      }
      std::vector<std::pair<MechanismRunner, MechanismRunner>> runners;
      for (const auto& [a, b] : eq) runners.emplace_back(MechanismRunner(a, env), MechanismRunner(b, env));
      for_each_profile(lists, 3, [&](const PreferenceProfile& p) {
        for (std::size_t k = 0; k < eq.size(); ++k) {
          ++compared;
          if (runners[k].first.run(p) != runners[k].second.run(p))
            fail(o, format_mechanism_spec(eq[k].first) + " vs " + format_mechanism_spec(eq[k].second));
        }
      });
    }
  }
  if (o.pass) o.detail = std::to_string(compared) + " profile comparisons";
  return o;
}

Result ac10() {
  Result o;
  const std::string root = MATCHLAB_SOURCE_DIR;
  const unsigned many = std::max(4u, std::thread::hardware_concurrency());
  const std::vector<std::vector<std::string>> runs{
      {"fixtures", "--format", "json"},
      {"compare", root + "/data/tiny_env.json", "--a", "chinese:e=2", "--b", "chinese:e=1", "--criterion", "both",
       "--format", "json"}};
  for (const auto& args : runs) {
    auto one = args, n = args;
    one.insert(one.end(), {"--threads", "1"});
    n.insert(n.end(), {"--threads", std::to_string(many)});
    const auto a = run_command(one), b = run_command(n);
    if (a.exit_code != b.exit_code || a.out != b.out || a.out.empty()) fail(o, args.front() + " output differs");
  }
  if (o.pass) o.detail = "fixtures and compare identical at 1 and " + std::to_string(many) + " threads";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, Result (*)()>> criteria{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}};
  std::vector<std::string> only(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%-5s %s  %s (%.2f s)\n", name, r.pass ? "PASS" : "FAIL", r.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !r.pass;
  }
  return failures;
}
