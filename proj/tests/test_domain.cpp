// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <set>

#include "matchlab/domain.hpp"
#include "matchlab/errors.hpp"

using namespace matchlab;

namespace {

// Number of ordered selections of up to `len` of m schools.
std::uint64_t arrangements(std::size_t m, std::size_t len) {
  std::uint64_t total = 0, term = 1;
  for (std::size_t l = 0; l <= len; ++l) {
    total += term;
    term *= m - l;
  }
  return total;
}

}  // namespace

TEST_CASE("full enumeration sizes") {
  CHECK(enumerate_preferences(2).size() == 5);
  CHECK(enumerate_preferences(3).size() == 16);
  CHECK(enumerate_preferences(4).size() == 65);
  CHECK(enumerate_preferences(7, 3).size() == 260);
  for (std::size_t m = 1; m <= 6; ++m) {
    for (std::size_t len = 0; len <= m; ++len) {
      CHECK(enumerate_preferences(m, len).size() == arrangements(m, len));
      CHECK(count_preferences(m, len) == arrangements(m, len));
    }
  }
}

TEST_CASE("enumeration order: by length, then lexicographic; no repeats") {
  const auto all = enumerate_preferences(3);
  CHECK(all[0].empty());
  CHECK(all[1] == Preference{0});
  CHECK(all[3] == Preference{2});
  CHECK(all[4] == Preference{0, 1});
  CHECK(all.back() == Preference{2, 1, 0});
  for (std::size_t k = 1; k < all.size(); ++k) {
    const bool ordered = all[k - 1].size() < all[k].size() || (all[k - 1].size() == all[k].size() && all[k - 1] < all[k]);
    CHECK(ordered);
  }
  std::set<Preference> distinct(all.begin(), all.end());
  CHECK(distinct.size() == all.size());
}

TEST_CASE("tiered domains") {
  const std::vector<std::vector<SchoolId>> tiers{{SchoolId{0}, SchoolId{1}}, {SchoolId{2}, SchoolId{3}}};
  const auto lists = enumerate_tiered(tiers);
  REQUIRE(lists.size() == 4);
  CHECK(lists[0] == Preference{0, 1, 2, 3});
  CHECK(lists[1] == Preference{0, 1, 3, 2});
  CHECK(lists[3] == Preference{1, 0, 3, 2});
  const auto d = PreferenceDomain::tiered(tiers);
  CHECK(d.types(StudentId{0}, 4) == lists);
  CHECK(d.reports(StudentId{0}, 4) == lists);
  CHECK(d.describe() == "tiered (2 tiers)");
  CHECK_THROWS_AS(d.types(StudentId{0}, 5), InvalidArgument);
  CHECK_THROWS_AS(PreferenceDomain::tiered({{SchoolId{0}}, {SchoolId{0}, SchoolId{1}}}).types(StudentId{0}, 2),
                  InvalidArgument);
  CHECK(enumerate_tiered(std::vector<std::vector<SchoolId>>{{SchoolId{0}, SchoolId{1}, SchoolId{2}}}).size() == 6);
}

TEST_CASE("explicit domains and misreport overrides") {
  const PreferenceProfile profile{{0, 1}, {1}};
  auto d = PreferenceDomain::explicit_profile(profile);
  CHECK(d.types(StudentId{1}, 2) == std::vector<Preference>{Preference{1}});
  CHECK(d.reports(StudentId{1}, 2) == std::vector<Preference>{Preference{1}});
  CHECK_THROWS_AS(d.types(StudentId{2}, 2), InvalidArgument);
  d.with_full_misreports(1);
  CHECK(d.reports(StudentId{0}, 2).size() == 3);
  CHECK(d.describe() == "explicit lists; misreports: full enumeration (length <= 1)");
  CHECK(PreferenceDomain::full(2).describe() == "full enumeration (length <= 2)");
  CHECK(d.exhaustive());
}

TEST_CASE("sampled domains are deterministic per seed and student") {
  const auto d = PreferenceDomain::sampled(10, 42);
  const auto a = d.types(StudentId{0}, 5);
  CHECK(a == d.types(StudentId{0}, 5));
  CHECK(a.size() == 10);
  CHECK(a != d.types(StudentId{1}, 5));
  CHECK(a != PreferenceDomain::sampled(10, 43).types(StudentId{0}, 5));
  std::set<Preference> distinct(a.begin(), a.end());
  CHECK(distinct.size() == a.size());
  for (const auto& p : PreferenceDomain::sampled(50, 1, 2).types(StudentId{3}, 4)) CHECK(p.size() <= 2);
  // Asking for more than exist returns every list.
  CHECK(PreferenceDomain::sampled(100, 5).types(StudentId{0}, 2).size() == 5);
  CHECK_FALSE(d.exhaustive());
  CHECK(d.describe() == "sampled (10 per student, seed 42, non-exhaustive)");
}
