// SPDX-License-Identifier: Apache-2.0
#include "matchlab/mechanisms.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "matchlab/errors.hpp"

namespace matchlab {

namespace {

constexpr std::size_t kNoLimit = std::numeric_limits<std::size_t>::max();

std::size_t saturating_add(std::size_t a, std::size_t b) {
  return a > kNoLimit - b ? kNoLimit : a + b;
}

void require_valid(const Problem& p) {
  auto report = validate_problem(p);
  if (!report.valid()) throw ValidationError(std::move(report.violations));
}

std::vector<std::span<const SchoolId>> views_of(const PreferenceProfile& profile) {
  std::vector<std::span<const SchoolId>> views;
  views.reserve(profile.size());
  for (const auto& pref : profile) views.push_back(pref.ranking());
  return views;
}

Matching to_matching(std::span<const std::int32_t> out) {
  std::vector<Outcome> assignment(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] >= 0) assignment[i] = SchoolId{static_cast<std::uint32_t>(out[i])};
  }
  return Matching(std::move(assignment));
}

}  // namespace

MechanismSpec MechanismSpec::gs(std::optional<std::size_t> k) {
  return MechanismSpec{Family::GaleShapley, k, {}, {}};
}

MechanismSpec MechanismSpec::sd(std::optional<std::size_t> k) {
  return MechanismSpec{Family::SerialDictatorship, k, {}, {}};
}

MechanismSpec MechanismSpec::fpf(std::vector<SchoolId> schools, std::optional<std::size_t> k) {
  std::sort(schools.begin(), schools.end());
  schools.erase(std::unique(schools.begin(), schools.end()), schools.end());
  return MechanismSpec{Family::FirstPreferenceFirst, k, std::move(schools), {}};
}

MechanismSpec MechanismSpec::boston(std::optional<std::size_t> k) {
  return MechanismSpec{Family::Boston, k, {}, {}};
}

MechanismSpec MechanismSpec::chinese(std::size_t e, std::optional<std::size_t> k) {
  return MechanismSpec{Family::ChineseParallel, k, {}, {e}};
}

MechanismSpec MechanismSpec::chinese_rounds(std::vector<std::size_t> lengths, std::optional<std::size_t> k) {
  return MechanismSpec{Family::ChineseParallel, k, {}, std::move(lengths)};
}

void check_spec(const MechanismSpec& spec) {
  if (spec.constraint_k && *spec.constraint_k == 0) throw InvalidArgument("list constraint k must be >= 1");
  if (spec.family != Family::FirstPreferenceFirst && !spec.fpf_schools.empty()) {
    throw InvalidArgument("first-preference-first schools given for a non-FPF mechanism");
  }
  if (spec.family == Family::ChineseParallel) {
    if (spec.round_lengths.empty()) throw InvalidArgument("Chinese parallel needs a round length");
    for (auto e : spec.round_lengths) {
      if (e == 0) throw InvalidArgument("Chinese round length must be >= 1");
    }
  } else if (!spec.round_lengths.empty()) {
    throw InvalidArgument("round lengths given for a non-Chinese mechanism");
  }
}

MechanismRunner::MechanismRunner(const MechanismSpec& spec, const Environment& env)
    : spec_(spec), n_(env.student_count), m_(env.school_count()) {
  check_spec(spec_);
  if (env.priorities.size() != m_) throw InvalidArgument("environment has a priority order per school");
  limit_ = spec_.constraint_k.value_or(kNoLimit);
  caps_ = env.capacities;

  ranks_.assign(m_ * n_, 0);
  for (std::size_t s = 0; s < m_; ++s) {
    const auto& order = env.priorities[s];
    if (order.size() != n_) throw InvalidArgument("priority order does not rank every student");
    for (std::size_t r = 0; r < n_; ++r) ranks_[s * n_ + order[r].value] = static_cast<std::uint32_t>(r);
  }

  if (spec_.family == Family::SerialDictatorship) {
    if (!has_common_priority(env)) throw CommonPriorityViolation();
    if (m_ > 0) common_order_ = env.priorities.front();
  }
  if (spec_.family == Family::FirstPreferenceFirst) {
    fpf_mask_.assign(m_, 0);
    for (auto s : spec_.fpf_schools) {
      if (s.value >= m_) throw UnknownSchool("first-preference-first school index " + std::to_string(s.value) +
                                             " is not in the environment");
      fpf_mask_[s.value] = 1;
    }
    keys_ = ranks_;
  }

  holder_offset_.assign(m_ + 1, 0);
  for (std::size_t s = 0; s < m_; ++s) {
    holder_offset_[s + 1] = holder_offset_[s] + static_cast<std::uint32_t>(std::min<std::size_t>(caps_[s], n_));
  }
  holders_.assign(holder_offset_[m_], 0);
  held_.assign(m_, 0);
  next_.assign(n_, 0);
  free_.reserve(n_);
  remaining_.assign(m_, 0);
  active_.assign(n_, 1);
  round_out_.assign(n_, kUnmatched);
  apply_.assign(n_, kUnmatched);
}

void MechanismRunner::deferred_acceptance(std::span<const std::span<const SchoolId>> reports, std::size_t limit,
                                          const std::uint32_t* keys, std::span<const std::uint32_t> caps,
                                          std::span<std::int32_t> out) {
  std::fill(held_.begin(), held_.end(), 0u);
  free_.clear();
  for (std::size_t k = 0; k < n_; ++k) {
    const std::size_t i = order_ == ProposalOrder::LowestIndexFirst ? n_ - 1 - k : k;
    if (!active_[i]) continue;
    next_[i] = 0;
    out[i] = kUnmatched;
    free_.push_back(static_cast<std::uint32_t>(i));
  }

  while (!free_.empty()) {
    const std::uint32_t i = free_.back();
    free_.pop_back();
    const auto& list = reports[i];
    const std::size_t len = std::min(list.size(), limit);
    while (next_[i] < len) {
      const std::uint32_t s = list[next_[i]++].value;
      const std::uint32_t cap = std::min<std::uint32_t>(caps[s], static_cast<std::uint32_t>(n_));
      if (cap == 0) continue;
      const std::uint32_t key = keys[s * n_ + i];
      const std::uint32_t base = holder_offset_[s];
      if (held_[s] < cap) {
        holders_[base + held_[s]++] = i;
        out[i] = static_cast<std::int32_t>(s);
        break;
      }
      std::uint32_t worst = base;
      std::uint32_t worst_key = keys[s * n_ + holders_[base]];
      for (std::uint32_t q = base + 1; q < base + cap; ++q) {
        const std::uint32_t k = keys[s * n_ + holders_[q]];
        if (k > worst_key) {
          worst_key = k;
          worst = q;
        }
      }
      if (key < worst_key) {
        const std::uint32_t rejected = holders_[worst];
        holders_[worst] = i;
        out[i] = static_cast<std::int32_t>(s);
        out[rejected] = kUnmatched;
        free_.push_back(rejected);
        break;
      }
    }
  }
}

void MechanismRunner::immediate_acceptance(std::span<const std::span<const SchoolId>> reports, std::size_t limit,
                                           std::span<std::int32_t> out) {
  std::copy(caps_.begin(), caps_.end(), remaining_.begin());
  std::fill(out.begin(), out.end(), kUnmatched);
  const std::size_t rounds = std::min(m_, limit);
  for (std::size_t r = 0; r < rounds; ++r) {
    bool any = false;
    for (std::size_t i = 0; i < n_; ++i) {
      apply_[i] = kUnmatched;
      if (out[i] == kUnmatched && r < std::min(reports[i].size(), limit)) {
        apply_[i] = static_cast<std::int32_t>(reports[i][r].value);
        any = true;
      }
    }
    if (!any) break;
    // Applicants are admitted in priority order while seats last.
    for (std::size_t s = 0; s < m_; ++s) {
      if (remaining_[s] == 0) continue;
      std::size_t applicants = 0;
      for (std::size_t i = 0; i < n_; ++i) applicants += apply_[i] == static_cast<std::int32_t>(s);
      if (applicants == 0) continue;
      if (applicants <= remaining_[s]) {
        for (std::size_t i = 0; i < n_; ++i) {
          if (apply_[i] == static_cast<std::int32_t>(s)) out[i] = static_cast<std::int32_t>(s);
        }
        remaining_[s] -= static_cast<std::uint32_t>(applicants);
        continue;
      }
      // Oversubscribed: take the best-ranked applicants.
      for (std::uint32_t seat = 0; seat < remaining_[s]; ++seat) {
        std::size_t best = n_;
        for (std::size_t i = 0; i < n_; ++i) {
          if (apply_[i] == static_cast<std::int32_t>(s) &&
              (best == n_ || ranks_[s * n_ + i] < ranks_[s * n_ + best])) {
            best = i;
          }
        }
        out[best] = static_cast<std::int32_t>(s);
        apply_[best] = kUnmatched;
      }
      remaining_[s] = 0;
    }
  }
}

void MechanismRunner::serial_pick(std::span<const std::span<const SchoolId>> reports, std::size_t limit,
                                  std::span<std::int32_t> out) {
  std::copy(caps_.begin(), caps_.end(), remaining_.begin());
  std::fill(out.begin(), out.end(), kUnmatched);
  for (auto student : common_order_) {
    const auto& list = reports[student.value];
    const std::size_t len = std::min(list.size(), limit);
    for (std::size_t p = 0; p < len; ++p) {
      const auto s = list[p].value;
      if (remaining_[s] > 0) {
        --remaining_[s];
        out[student.value] = static_cast<std::int32_t>(s);
        break;
      }
    }
  }
}

void MechanismRunner::chinese(std::span<const std::span<const SchoolId>> reports, std::size_t limit,
                              std::span<std::int32_t> out, std::vector<std::vector<std::int32_t>>* trace) {
  std::copy(caps_.begin(), caps_.end(), remaining_.begin());
  std::fill(active_.begin(), active_.end(), 1);
  std::fill(out.begin(), out.end(), kUnmatched);
  std::size_t budget = 0;
  std::size_t left = n_;
  for (std::size_t round = 0;; ++round) {
    const auto& lengths = spec_.round_lengths;
    budget = saturating_add(budget, lengths[std::min(round, lengths.size() - 1)]);
    std::fill(round_out_.begin(), round_out_.end(), kUnmatched);
    deferred_acceptance(reports, std::min(budget, limit), ranks_.data(), remaining_, round_out_);
    // Matches are final; the unmatched carry over with reduced capacities.
    for (std::size_t i = 0; i < n_; ++i) {
      if (!active_[i] || round_out_[i] == kUnmatched) continue;
      out[i] = round_out_[i];
      --remaining_[static_cast<std::size_t>(round_out_[i])];
      active_[i] = 0;
      --left;
    }
    if (trace) trace->emplace_back(out.begin(), out.end());
    if (left == 0 || budget >= m_ || budget >= limit) break;
  }
  std::fill(active_.begin(), active_.end(), 1);
}

void MechanismRunner::build_fpf_keys(std::span<const std::span<const SchoolId>> reports, std::size_t limit) {
  const auto absent = static_cast<std::uint32_t>(m_ * n_);
  for (std::size_t s = 0; s < m_; ++s) {
    if (!fpf_mask_[s]) continue;
    for (std::size_t i = 0; i < n_; ++i) keys_[s * n_ + i] = absent + ranks_[s * n_ + i];
  }
  for (std::size_t i = 0; i < n_; ++i) {
    const auto& list = reports[i];
    const std::size_t len = std::min(list.size(), limit);
    for (std::size_t p = 0; p < len; ++p) {
      const auto s = list[p].value;
      if (fpf_mask_[s]) keys_[s * n_ + i] = static_cast<std::uint32_t>(p * n_) + ranks_[s * n_ + i];
    }
  }
}

void MechanismRunner::run(std::span<const std::span<const SchoolId>> reports, std::span<std::int32_t> out) {
  ++evaluations_;
  switch (spec_.family) {
    case Family::GaleShapley:
      deferred_acceptance(reports, limit_, ranks_.data(), caps_, out);
      break;
    case Family::SerialDictatorship:
      serial_pick(reports, limit_, out);
      break;
    case Family::FirstPreferenceFirst:
      build_fpf_keys(reports, limit_);
      deferred_acceptance(reports, limit_, keys_.data(), caps_, out);
      break;
    case Family::Boston:
      immediate_acceptance(reports, limit_, out);
      break;
    case Family::ChineseParallel:
      chinese(reports, limit_, out, nullptr);
      break;
  }
}

Matching MechanismRunner::run(const PreferenceProfile& profile) {
  if (profile.size() != n_) throw InvalidArgument("profile size does not match student count");
  auto views = views_of(profile);
  std::vector<std::int32_t> out(n_, kUnmatched);
  run(views, out);
  return to_matching(out);
}

std::vector<Matching> MechanismRunner::run_rounds(const PreferenceProfile& profile) {
  if (profile.size() != n_) throw InvalidArgument("profile size does not match student count");
  if (spec_.family != Family::ChineseParallel) return {run(profile)};
  auto views = views_of(profile);
  std::vector<std::int32_t> out(n_, kUnmatched);
  std::vector<std::vector<std::int32_t>> trace;
  ++evaluations_;
  chinese(views, limit_, out, &trace);
  std::vector<Matching> rounds;
  rounds.reserve(trace.size());
  for (const auto& t : trace) rounds.push_back(to_matching(t));
  return rounds;
}

Matching gale_shapley(const Problem& p, ProposalOrder order) {
  require_valid(p);
  MechanismRunner runner(MechanismSpec::gs(), p.environment);
  runner.set_proposal_order(order);
  return runner.run(p.profile);
}

Matching serial_dictatorship(const Problem& p) {
  require_valid(p);
  MechanismRunner runner(MechanismSpec::sd(), p.environment);
  return runner.run(p.profile);
}

Environment adjust_priorities_fpf(const PreferenceProfile& profile, const Environment& env,
                                  std::span<const SchoolId> fpf_schools) {
  Environment adjusted = env;
  for (auto s : fpf_schools) {
    if (s.value >= env.school_count()) {
      throw UnknownSchool("first-preference-first school index " + std::to_string(s.value) +
                          " is not in the environment");
    }
    auto position_of = [&](StudentId i) {
      auto pos = i.value < profile.size() ? profile[i.value].position(s) : std::nullopt;
      return pos.value_or(kNoLimit);
    };
    auto& order = adjusted.priorities[s.value];
    std::stable_sort(order.begin(), order.end(),
                     [&](StudentId a, StudentId b) { return position_of(a) < position_of(b); });
  }
  return adjusted;
}

Matching first_preference_first(const Problem& p, std::span<const SchoolId> fpf_schools) {
  require_valid(p);
  MechanismRunner runner(MechanismSpec::fpf({fpf_schools.begin(), fpf_schools.end()}), p.environment);
  return runner.run(p.profile);
}

Matching boston(const Problem& p) {
  require_valid(p);
  MechanismRunner runner(MechanismSpec::boston(), p.environment);
  return runner.run(p.profile);
}

Matching chinese_parallel(const Problem& p, std::size_t e) {
  const std::size_t lengths[] = {e};
  return chinese_parallel(p, lengths);
}

Matching chinese_parallel(const Problem& p, std::span<const std::size_t> round_lengths) {
  require_valid(p);
  MechanismRunner runner(MechanismSpec::chinese_rounds({round_lengths.begin(), round_lengths.end()}),
                         p.environment);
  return runner.run(p.profile);
}

std::vector<Matching> chinese_parallel_rounds(const Problem& p, std::span<const std::size_t> round_lengths) {
  require_valid(p);
  MechanismRunner runner(MechanismSpec::chinese_rounds({round_lengths.begin(), round_lengths.end()}),
                         p.environment);
  return runner.run_rounds(p.profile);
}

Matching apply_mechanism(const MechanismSpec& spec, const Problem& p) {
  require_valid(p);
  MechanismRunner runner(spec, p.environment);
  return runner.run(p.profile);
}

}  // namespace matchlab
