// SPDX-License-Identifier: Apache-2.0
#include "matchlab/domain.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "matchlab/errors.hpp"

namespace matchlab {

namespace {

void extend(std::vector<SchoolId>& prefix, std::vector<bool>& used, std::size_t length,
            std::vector<Preference>& out) {
  if (prefix.size() == length) {
    out.emplace_back(prefix);
    return;
  }
  for (std::uint32_t s = 0; s < used.size(); ++s) {
    if (used[s]) continue;
    used[s] = true;
    prefix.push_back(SchoolId{s});
    extend(prefix, used, length, out);
    prefix.pop_back();
    used[s] = false;
  }
}

// mt19937_64 output is fixed by the standard; the std distributions are
// not, so reduce to a range by rejection here.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = ~0ULL - (~0ULL % bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

 private:
  std::mt19937_64 engine_;
};

bool enumeration_less(const Preference& a, const Preference& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

}  // namespace

std::vector<Preference> enumerate_preferences(std::size_t m, std::optional<std::size_t> max_len) {
  const std::size_t top = std::min(m, max_len.value_or(m));
  std::vector<Preference> out;
  out.reserve(static_cast<std::size_t>(count_preferences(m, max_len)));
  std::vector<SchoolId> prefix;
  std::vector<bool> used(m, false);
  for (std::size_t len = 0; len <= top; ++len) extend(prefix, used, len, out);
  return out;
}

std::uint64_t count_preferences(std::size_t m, std::optional<std::size_t> max_len) {
  const std::size_t top = std::min(m, max_len.value_or(m));
  std::uint64_t total = 0;
  std::uint64_t term = 1;  // m! / (m - j)!
  for (std::size_t j = 0; j <= top; ++j) {
    total += term;
    term *= (m - j);
  }
  return total;
}

std::vector<Preference> enumerate_tiered(std::span<const std::vector<SchoolId>> tiers) {
  std::vector<std::vector<std::vector<SchoolId>>> orders;
  for (auto tier : tiers) {
    std::sort(tier.begin(), tier.end());
    std::vector<std::vector<SchoolId>> perms;
    do {
      perms.push_back(tier);
    } while (std::next_permutation(tier.begin(), tier.end()));
    orders.push_back(std::move(perms));
  }
  std::vector<Preference> out;
  std::vector<std::size_t> digit(orders.size(), 0);
  while (true) {
    std::vector<SchoolId> ranking;
    for (std::size_t t = 0; t < orders.size(); ++t) {
      const auto& part = orders[t][digit[t]];
      ranking.insert(ranking.end(), part.begin(), part.end());
    }
    out.emplace_back(std::move(ranking));
    // Odometer with the first tier most significant.
    std::size_t t = orders.size();
    while (t > 0) {
      --t;
      if (++digit[t] < orders[t].size()) break;
      digit[t] = 0;
      if (t == 0) return out;
    }
    if (orders.empty()) return out;
  }
}

PreferenceDomain PreferenceDomain::full(std::optional<std::size_t> max_len) {
  PreferenceDomain d;
  d.kind = Kind::FullEnumeration;
  d.max_len = max_len;
  return d;
}

PreferenceDomain PreferenceDomain::tiered(std::vector<std::vector<SchoolId>> tiers) {
  PreferenceDomain d;
  d.kind = Kind::Tiered;
  d.tiers = std::move(tiers);
  return d;
}

PreferenceDomain PreferenceDomain::explicit_lists(std::vector<std::vector<Preference>> lists) {
  PreferenceDomain d;
  d.kind = Kind::Explicit;
  d.lists = std::move(lists);
  return d;
}

PreferenceDomain PreferenceDomain::explicit_profile(const PreferenceProfile& profile) {
  std::vector<std::vector<Preference>> lists;
  lists.reserve(profile.size());
  for (const auto& p : profile) lists.push_back({p});
  return explicit_lists(std::move(lists));
}

PreferenceDomain PreferenceDomain::sampled(std::size_t count, std::uint64_t seed, std::optional<std::size_t> max_len) {
  PreferenceDomain d;
  d.kind = Kind::Sampled;
  d.sample_count = count;
  d.seed = seed;
  d.max_len = max_len;
  return d;
}

PreferenceDomain& PreferenceDomain::with_full_misreports(std::optional<std::size_t> max_len) {
  full_misreports = true;
  misreport_max_len = max_len;
  return *this;
}

PreferenceDomain& PreferenceDomain::with_cap(std::uint64_t cap) {
  size_cap = cap;
  return *this;
}

std::vector<Preference> PreferenceDomain::types(StudentId i, std::size_t m) const {
  switch (kind) {
    case Kind::FullEnumeration:
      return enumerate_preferences(m, max_len);
    case Kind::Tiered: {
      std::vector<bool> covered(m, false);
      std::size_t total = 0;
      for (const auto& tier : tiers) {
        for (auto s : tier) {
          if (s.value >= m || covered[s.value]) throw InvalidArgument("tiers must partition the schools");
          covered[s.value] = true;
          ++total;
        }
      }
      if (total != m) throw InvalidArgument("tiers must partition the schools");
      return enumerate_tiered(tiers);
    }
    case Kind::Explicit:
      if (i.value >= lists.size()) throw InvalidArgument("explicit domain has no entry for a student");
      return lists[i.value];
    case Kind::Sampled: {
      const std::size_t top = std::min(m, max_len.value_or(m));
      Draw rng(seed + 0x632BE59BD9B4E019ULL * (i.value + 1));
      std::set<Preference, decltype(&enumeration_less)> drawn(&enumeration_less);
      const std::uint64_t available = count_preferences(m, max_len);
      const std::size_t want = static_cast<std::size_t>(std::min<std::uint64_t>(sample_count, available));
      for (std::size_t attempt = 0; drawn.size() < want && attempt < 64 * want + 64; ++attempt) {
        const auto len = static_cast<std::size_t>(rng.below(top + 1));
        std::vector<SchoolId> pool(m);
        for (std::uint32_t s = 0; s < m; ++s) pool[s] = SchoolId{s};
        for (std::size_t p = 0; p < len; ++p) {
          const auto pick = p + static_cast<std::size_t>(rng.below(m - p));
          std::swap(pool[p], pool[pick]);
        }
        pool.resize(len);
        drawn.insert(Preference(std::move(pool)));
      }
      return {drawn.begin(), drawn.end()};
    }
  }
  return {};
}

std::vector<Preference> PreferenceDomain::reports(StudentId i, std::size_t m) const {
  if (full_misreports) return enumerate_preferences(m, misreport_max_len);
  return types(i, m);
}

std::string PreferenceDomain::describe() const {
  std::string out;
  switch (kind) {
    case Kind::FullEnumeration:
      out = "full enumeration";
      if (max_len) out += " (length <= " + std::to_string(*max_len) + ")";
      break;
    case Kind::Tiered:
      out = "tiered (" + std::to_string(tiers.size()) + " tiers)";
      break;
    case Kind::Explicit:
      out = "explicit lists";
      break;
    case Kind::Sampled:
      out = "sampled (" + std::to_string(sample_count) + " per student, seed " + std::to_string(seed) +
            ", non-exhaustive)";
      break;
  }
  if (full_misreports) {
    out += "; misreports: full enumeration";
    if (misreport_max_len) out += " (length <= " + std::to_string(*misreport_max_len) + ")";
  }
  return out;
}

}  // namespace matchlab
