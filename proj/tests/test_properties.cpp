// SPDX-License-Identifier: Apache-2.0
// Invariants checked over generated instances.
#include <doctest.h>

#include "matchlab/analysis.hpp"
#include "matchlab/io.hpp"
#include "oracles.hpp"

using namespace matchlab;

namespace {

std::vector<MechanismSpec> all_families(bool common) {
  std::vector<MechanismSpec> out{MechanismSpec::gs(),       MechanismSpec::gs(2),
                                 MechanismSpec::boston(),   MechanismSpec::boston(1),
                                 MechanismSpec::fpf({SchoolId{0}}), MechanismSpec::fpf({SchoolId{1}, SchoolId{2}}, 2),
                                 MechanismSpec::chinese(1), MechanismSpec::chinese(2),
                                 MechanismSpec::chinese(2, 2), MechanismSpec::chinese_rounds({1, 3})};
  if (common) {
    out.push_back(MechanismSpec::sd());
    out.push_back(MechanismSpec::sd(2));
  }
  return out;
}

}  // namespace

TEST_CASE("reaching s by any report means ranking s alone reaches it") {
  oracle::Rng rng(1);
  const auto reports = enumerate_preferences(3);
  for (int trial = 0; trial < 150; ++trial) {
    const bool common = trial % 2 == 0;
    const auto env = oracle::random_environment(rng, 4, 3, 1 + rng.below(2), common);
    auto profile = oracle::random_profile(rng, 4, 3);
    const auto i = rng.below(4);
    for (const auto& spec : all_families(common)) {
      MechanismRunner runner(spec, env);
      for (const auto& r : reports) {
        profile[i] = r;
        const auto got = runner.run(profile)[StudentId{static_cast<std::uint32_t>(i)}];
        if (!got) continue;
        profile[i] = Preference(std::vector<SchoolId>{*got});
        INFO(format_mechanism_spec(spec) << " " << format_profile(profile, env));
        CHECK(runner.run(profile)[StudentId{static_cast<std::uint32_t>(i)}] == got);
      }
    }
  }
}

TEST_CASE("constrained mechanisms only see the top k") {
  oracle::Rng rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const bool common = trial % 2 == 0;
    const auto env = oracle::random_environment(rng, 5, 4, 2, common);
    const auto profile = oracle::random_profile(rng, 5, 4);
    for (std::size_t k = 1; k <= 4; ++k) {
      for (auto spec : all_families(common)) {
        spec.constraint_k = k;
        const Problem p{env, profile};
        CHECK(apply_mechanism(spec, p) == apply_mechanism(spec, Problem{env, truncate(profile, k)}));
      }
    }
    // phi^m = phi
    for (auto spec : all_families(common)) {
      auto constrained = spec;
      constrained.constraint_k = 4;
      spec.constraint_k.reset();
      CHECK(apply_mechanism(constrained, Problem{env, profile}) == apply_mechanism(spec, Problem{env, profile}));
    }
  }
}

TEST_CASE("short deviations decide equilibrium exactly as all deviations do") {
  oracle::Rng rng(3);
  const auto full = PreferenceDomain::full();
  for (int trial = 0; trial < 300; ++trial) {
    const auto env = oracle::random_environment(rng, 4, 3, 1 + rng.below(2));
    const auto truth = oracle::random_profile(rng, 4, 3);
    auto reported = oracle::random_profile(rng, 4, 3);
    for (const auto& spec : all_families(false)) {
      MechanismRunner runner(spec, env);
      const auto base = runner.run(reported);
      bool any = false, singles = false;
      for (std::uint32_t j = 0; j < 4; ++j) {
        auto q = reported;
        for (const auto& r : enumerate_preferences(3)) {
          q[j] = r;
          const auto o = runner.run(q)[StudentId{j}];
          if (truth[j].prefers(o, base[StudentId{j}])) {
            any = true;
            // dropping out helps when the current school is unacceptable
            if (r.size() <= 1) singles = true;
          }
        }
      }
      CHECK(any == singles);
      CHECK(is_nash_equilibrium(spec, truth, reported, env, full).equilibrium == !any);
    }
  }
}

TEST_CASE("prefilter and pruning leave verdicts and witnesses unchanged") {
  oracle::Rng rng(4);
  const auto d = PreferenceDomain::full();
  for (int trial = 0; trial < 12; ++trial) {
    const bool common = trial % 2 == 0;
    const auto env = oracle::random_environment(rng, 3, 3, 1, common);
    std::vector<MechanismSpec> specs{MechanismSpec::gs(2), MechanismSpec::boston(2), MechanismSpec::chinese(1, 2)};
    if (common) specs.push_back(MechanismSpec::sd(2));
    for (const auto& spec : specs) {
      const auto plain = strategyproof_school_sets(spec, env, d, {1, false, false});
      for (ScanOptions o : {ScanOptions{1, true, false}, ScanOptions{1, false, true}, ScanOptions{1, true, true}}) {
        const auto fast = strategyproof_school_sets(spec, env, d, o);
        CHECK(fast.sp == plain.sp);
        CHECK(fast.witnesses == plain.witnesses);
      }
      for (std::uint32_t s = 0; s < 3; ++s) {
        const auto a = strategyproof_admission_in_equilibrium(spec, env, StudentId{1}, SchoolId{s}, d, {1, false, false});
        const auto b = strategyproof_admission_in_equilibrium(spec, env, StudentId{1}, SchoolId{s}, d, {1, true, true});
        CHECK(a.strategyproof == b.strategyproof);
        CHECK(a.witness == b.witness);
      }
    }
  }
}

TEST_CASE("manipulations under constrained GS need more than k listed schools") {
  oracle::Rng rng(5);
  const auto reports = enumerate_preferences(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto env = oracle::random_environment(rng, 5, 4, 2);
    const auto profile = oracle::random_profile(rng, 5, 4);
    for (std::size_t k = 1; k <= 3; ++k) {
      const Problem p{env, profile};
      for (std::uint32_t i = 0; i < 5; ++i) {
        const auto w = find_manipulation(MechanismSpec::gs(k), p, StudentId{i}, PreferenceDomain::full());
        if (!w) continue;
        const auto& truth = profile[i];
        CHECK(truth.size() > k);
        CHECK(*truth.position(*w->deviating_outcome) >= k);
      }
    }
  }
}

TEST_CASE("strategy-proof admission implies strategy-proof admission in equilibrium") {
  oracle::Rng rng(6);
  const auto d = PreferenceDomain::full();
  for (int trial = 0; trial < 8; ++trial) {
    const auto env = oracle::random_environment(rng, 3, 2 + trial % 2);
    for (const auto& spec : {MechanismSpec::boston(), MechanismSpec::gs(1), MechanismSpec::chinese(1, 2),
                             MechanismSpec::fpf({SchoolId{0}})}) {
      const auto sets = strategyproof_school_sets(spec, env, d);
      for (std::uint32_t i = 0; i < 3; ++i) {
        for (std::uint32_t s = 0; s < env.school_count(); ++s) {
          if (!sets.sp[i][s]) continue;
          CHECK(strategyproof_admission_in_equilibrium(spec, env, StudentId{i}, SchoolId{s}, d).strategyproof);
        }
      }
    }
  }
}

TEST_CASE("results do not depend on the thread count") {
  oracle::Rng rng(7);
  const auto env = oracle::random_environment(rng, 4, 3);
  const auto d = PreferenceDomain::full();
  for (const auto& spec : {MechanismSpec::boston(2), MechanismSpec::chinese(1)}) {
    const auto one = strategyproof_school_sets(spec, env, d, {1});
    for (unsigned t : {2u, 3u, 8u}) {
      const auto many = strategyproof_school_sets(spec, env, d, {t});
      CHECK(many.sp == one.sp);
      CHECK(many.witnesses == one.witnesses);
    }
    const auto e1 = strategyproof_admission_in_equilibrium(spec, env, StudentId{2}, SchoolId{0}, d, {1});
    const auto e4 = strategyproof_admission_in_equilibrium(spec, env, StudentId{2}, SchoolId{0}, d, {4});
    CHECK(e1.witness == e4.witness);
    CHECK(e1.certificate == e4.certificate);
  }
  const auto m1 = compare_manipulability(MechanismSpec::gs(1), MechanismSpec::boston(), {env}, d, {1});
  const auto m3 = compare_manipulability(MechanismSpec::gs(1), MechanismSpec::boston(), {env}, d, {3});
  CHECK(m1.environments[0].vulnerable_a == m3.environments[0].vulnerable_a);
  CHECK(m1.environments[0].only_a_example == m3.environments[0].only_a_example);
  CHECK(m1.environments[0].only_b_example == m3.environments[0].only_b_example);
}

TEST_CASE("mechanism equivalences on random instances") {
  oracle::Rng rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.below(5), m = 2 + rng.below(3);
    const bool common = trial % 2 == 0;
    const auto env = oracle::random_environment(rng, n, m, 1 + rng.below(2), common);
    const Problem p{env, oracle::random_profile(rng, n, m)};
    std::vector<SchoolId> every;
    for (std::uint32_t s = 0; s < m; ++s) every.push_back(SchoolId{s});
    const auto gs = apply_mechanism(MechanismSpec::gs(), p);
    const auto boston = apply_mechanism(MechanismSpec::boston(), p);
    CHECK(apply_mechanism(MechanismSpec::fpf({}), p) == gs);
    CHECK(apply_mechanism(MechanismSpec::fpf(every), p) == boston);
    CHECK(apply_mechanism(MechanismSpec::chinese(1), p) == boston);
    CHECK(apply_mechanism(MechanismSpec::chinese(m), p) == gs);
    CHECK(apply_mechanism(MechanismSpec::chinese(m + 3), p) == gs);
    if (common) CHECK(apply_mechanism(MechanismSpec::sd(), p) == gs);
  }
}

TEST_CASE("Chinese parallel: listing s first wins s whenever any report does") {
  oracle::Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const auto env = oracle::random_environment(rng, 4, 3, 1 + rng.below(2));
    auto profile = oracle::random_profile(rng, 4, 3);
    const std::size_t e = 1 + rng.below(3);
    MechanismRunner runner(MechanismSpec::chinese(e), env);
    const auto original = profile[0];
    for (const auto& r : enumerate_preferences(3)) {
      profile[0] = r;
      const auto got = runner.run(profile)[StudentId{0}];
      if (!got) continue;
      // Put the reached school first and keep the rest of the true list.
      std::vector<SchoolId> moved{*got};
      for (auto s : original.ranking()) {
        if (s != *got) moved.push_back(s);
      }
      profile[0] = Preference(moved);
      CHECK(runner.run(profile)[StudentId{0}] == got);
    }
  }
}
