// SPDX-License-Identifier: Apache-2.0
#include "matchlab/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <set>

#include "matchlab/errors.hpp"
#include "parallel.hpp"

namespace matchlab {

namespace {

constexpr std::int32_t kUnknown = -2;
constexpr std::uint64_t kNone = std::numeric_limits<std::uint64_t>::max();

Outcome to_outcome(std::int32_t v) {
  if (v < 0) return std::nullopt;
  return SchoolId{static_cast<std::uint32_t>(v)};
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > kNone / a) return kNone;
  return a * b;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) { return a > kNone - b ? kNone : a + b; }

void require_valid(const Environment& env) {
  auto report = validate_environment(env);
  if (!report.valid()) throw ValidationError(std::move(report.violations));
}

void require_valid(const Problem& p) {
  auto report = validate_problem(p);
  if (!report.valid()) throw ValidationError(std::move(report.violations));
}

void check_cap(std::uint64_t estimate, const PreferenceDomain& domain) {
  if (estimate > domain.size_cap) throw SizeCapExceeded(estimate, domain.size_cap);
}

Preference class_key(const MechanismSpec& spec, const Preference& p) {
  return spec.constraint_k ? truncate(p, *spec.constraint_k) : p;
}

// phi^k only sees P^k, so one member per truncation class suffices. Keeping
// the first member preserves minimum-index witnesses.
std::vector<std::uint32_t> class_representatives(const MechanismSpec& spec, const std::vector<Preference>& list) {
  std::vector<std::uint32_t> reps;
  if (!spec.constraint_k) {
    reps.resize(list.size());
    std::iota(reps.begin(), reps.end(), 0u);
    return reps;
  }
  std::set<Preference> seen;
  for (std::uint32_t idx = 0; idx < list.size(); ++idx) {
    if (seen.insert(class_key(spec, list[idx])).second) reps.push_back(idx);
  }
  return reps;
}

bool contains_all_singletons(const std::vector<Preference>& list, std::size_t m) {
  std::vector<bool> seen(m, false);
  for (const auto& p : list) {
    if (p.size() == 1) seen[p[0].value] = true;
  }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

std::vector<std::span<const SchoolId>> views_of(const PreferenceProfile& profile) {
  std::vector<std::span<const SchoolId>> views;
  views.reserve(profile.size());
  for (const auto& p : profile) views.push_back(p.ranking());
  return views;
}

// One student's admission audit: the P_{-i} space, i's types and reports,
// and the distinct lists i can submit.
struct StudentScan {
  const MechanismSpec* spec = nullptr;
  const Environment* env = nullptr;
  std::size_t n = 0;
  std::size_t m = 0;
  StudentId i;
  std::vector<std::uint32_t> others;
  std::vector<std::vector<Preference>> other_types;
  std::vector<std::vector<std::uint32_t>> other_reps;
  std::vector<std::vector<Preference>> other_deviations;  // equilibrium scans only
  std::vector<bool> other_all_singletons;
  std::uint64_t outer = 1;

  std::vector<Preference> types;
  std::vector<Preference> reports;
  std::vector<std::uint32_t> report_reps;
  std::vector<Preference> submitted;
  std::vector<std::uint32_t> type_u;
  std::vector<std::uint32_t> report_u;  // parallel to report_reps
  std::vector<std::uint32_t> single_u;
  std::vector<Preference> singles;
  bool reports_all_singletons = false;
  bool prune = false;

  StudentScan(const MechanismSpec& s, const Environment& e, StudentId student, const PreferenceDomain& domain,
              bool equilibrium, const ScanOptions& options)
      : spec(&s), env(&e), n(e.student_count), m(e.school_count()), i(student) {
    if (i.value >= n) throw InvalidArgument("student index out of range");
    for (std::uint32_t j = 0; j < n; ++j) {
      if (j == i.value) continue;
      others.push_back(j);
      other_types.push_back(domain.types(StudentId{j}, m));
      auto& list = other_types.back();
      if (equilibrium) {
        std::vector<std::uint32_t> all(list.size());
        std::iota(all.begin(), all.end(), 0u);
        other_reps.push_back(std::move(all));
        auto dev = domain.reports(StudentId{j}, m);
        other_all_singletons.push_back(contains_all_singletons(dev, m));
        std::vector<Preference> reduced;
        for (auto r : class_representatives(s, dev)) reduced.push_back(dev[r]);
        other_deviations.push_back(std::move(reduced));
      } else {
        other_reps.push_back(class_representatives(s, list));
      }
      outer = saturating_mul(outer, other_reps.back().size());
    }

    types = domain.types(i, m);
    reports = domain.reports(i, m);
    report_reps = class_representatives(s, reports);
    reports_all_singletons = contains_all_singletons(reports, m);

    std::map<Preference, std::uint32_t> index;
    auto intern = [&](const Preference& p) {
      auto key = class_key(s, p);
      auto [it, inserted] = index.try_emplace(key, static_cast<std::uint32_t>(submitted.size()));
      if (inserted) submitted.push_back(std::move(key));
      return it->second;
    };
    for (const auto& t : types) type_u.push_back(intern(t));
    for (auto r : report_reps) report_u.push_back(intern(reports[r]));
    for (std::uint32_t x = 0; x < m; ++x) {
      singles.push_back(Preference(std::vector<SchoolId>{SchoolId{x}}));
      single_u.push_back(intern(singles.back()));
    }
    prune = options.prune && s.constraint_k &&
            (s.family == Family::GaleShapley || s.family == Family::SerialDictatorship);
  }

  std::uint64_t estimate() const { return saturating_mul(outer, submitted.size()); }

  std::vector<std::uint32_t> decode(std::uint64_t o) const {
    std::vector<std::uint32_t> pos(others.size());
    for (std::size_t k = others.size(); k-- > 0;) {
      pos[k] = other_reps[k][o % other_reps[k].size()];
      o /= other_reps[k].size();
    }
    return pos;
  }

  PreferenceProfile profile_at(std::uint64_t o, std::uint32_t t) const {
    PreferenceProfile profile(n);
    const auto pos = decode(o);
    for (std::size_t k = 0; k < others.size(); ++k) profile[others[k]] = other_types[k][pos[k]];
    profile[i.value] = types[t];
    return profile;
  }
};

using Hit = std::pair<std::uint32_t, std::uint32_t>;  // (type index, position in report_reps)

class ScanWorker {
 public:
  ScanWorker(const StudentScan& scan, bool prefilter)
      : scan_(scan),
        prefilter_(prefilter),
        runner_(*scan.spec, *scan.env),
        views_(scan.n),
        out_(scan.n, MechanismRunner::kUnmatched),
        base_(scan.n, MechanismRunner::kUnmatched),
        cache_(scan.submitted.size(), kUnknown),
        achievable_(scan.m, 0),
        true_pos_(scan.others.size(), 0) {}

  void load(std::uint64_t o) {
    for (std::size_t k = scan_.others.size(); k-- > 0;) {
      const auto& reps = scan_.other_reps[k];
      const auto pos = reps[o % reps.size()];
      o /= reps.size();
      views_[scan_.others[k]] = scan_.other_types[k][pos].ranking();
      true_pos_[k] = pos;
    }
    std::fill(cache_.begin(), cache_.end(), kUnknown);
    achievable_ready_ = false;
  }

  std::optional<Hit> admission(SchoolId s) {
    if (prefilter_ && eval(scan_.single_u[s.value]) != static_cast<std::int32_t>(s.value)) return std::nullopt;
    std::optional<std::uint32_t> first_report;
    bool searched = false;
    for (std::uint32_t t = 0; t < scan_.types.size(); ++t) {
      if (!type_can_witness(t, s)) continue;
      const auto& truth = scan_.types[t];
      if (!truth.prefers(s, to_outcome(eval(scan_.type_u[t])))) continue;
      // The report giving s does not depend on the type.
      if (!searched) {
        searched = true;
        for (std::uint32_t r = 0; r < scan_.report_u.size(); ++r) {
          if (eval(scan_.report_u[r]) == static_cast<std::int32_t>(s.value)) {
            first_report = r;
            break;
          }
        }
      }
      if (!first_report) return std::nullopt;
      return Hit{t, *first_report};
    }
    return std::nullopt;
  }

  std::optional<Hit> equilibrium_admission(SchoolId s) {
    if (prefilter_ && eval(scan_.single_u[s.value]) != static_cast<std::int32_t>(s.value)) return std::nullopt;
    compute_achievable();
    std::optional<std::uint32_t> type;
    for (std::uint32_t t = 0; t < scan_.types.size() && !type; ++t) {
      if (!type_can_witness(t, s)) continue;
      const auto& truth = scan_.types[t];
      // i must best-respond: nothing reachable beats s under the true type.
      bool beaten = false;
      for (auto x : truth.ranking()) {
        if (x == s) break;
        if (achievable_[x.value]) {
          beaten = true;
          break;
        }
      }
      if (beaten) continue;
      if (truth.prefers(s, to_outcome(eval(scan_.type_u[t])))) type = t;
    }
    if (!type) return std::nullopt;
    // Whether the others best-respond does not depend on i's true type.
    for (std::uint32_t r = 0; r < scan_.report_u.size(); ++r) {
      if (eval(scan_.report_u[r]) != static_cast<std::int32_t>(s.value)) continue;
      if (others_in_equilibrium(scan_.report_u[r])) return Hit{*type, r};
    }
    return std::nullopt;
  }

 private:
  std::int32_t eval(std::uint32_t u) {
    if (cache_[u] == kUnknown) {
      views_[scan_.i.value] = scan_.submitted[u].ranking();
      runner_.run(views_, out_);
      cache_[u] = out_[scan_.i.value];
    }
    return cache_[u];
  }

  bool type_can_witness(std::uint32_t t, SchoolId s) const {
    const auto& truth = scan_.types[t];
    const auto pos = truth.position(s);
    if (!pos) return false;
    // Constrained GS/SD: a profitable misreport needs more than k listed
    // schools and s outside the top k.
    if (scan_.prune) {
      const auto k = *scan_.spec->constraint_k;
      if (truth.size() <= k || *pos < k) return false;
    }
    return true;
  }

  void compute_achievable() {
    if (achievable_ready_) return;
    achievable_ready_ = true;
    std::fill(achievable_.begin(), achievable_.end(), 0);
    if (scan_.reports_all_singletons) {
      // Anything reachable at all is reachable by ranking it alone.
      for (std::uint32_t x = 0; x < scan_.m; ++x) {
        achievable_[x] = eval(scan_.single_u[x]) == static_cast<std::int32_t>(x);
      }
      return;
    }
    for (auto u : scan_.report_u) {
      const auto o = eval(u);
      if (o >= 0) achievable_[static_cast<std::size_t>(o)] = 1;
    }
  }

  bool others_in_equilibrium(std::uint32_t u) {
    const auto i = scan_.i.value;
    views_[i] = scan_.submitted[u].ranking();
    runner_.run(views_, base_);
    for (std::size_t k = 0; k < scan_.others.size(); ++k) {
      const auto j = scan_.others[k];
      const auto& truth = scan_.other_types[k][true_pos_[k]];
      const Outcome current = to_outcome(base_[j]);
      const auto saved = views_[j];
      bool improves = false;
      if (scan_.other_all_singletons[k]) {
        // j reports truthfully here, so current is listed or empty and
        // dropping out never helps.
        for (auto x : truth.ranking()) {
          if (current && x == *current) break;
          views_[j] = scan_.singles[x.value].ranking();
          runner_.run(views_, out_);
          if (out_[j] == static_cast<std::int32_t>(x.value)) {
            improves = true;
            break;
          }
        }
      } else {
        for (const auto& d : scan_.other_deviations[k]) {
          views_[j] = d.ranking();
          runner_.run(views_, out_);
          if (truth.prefers(to_outcome(out_[j]), current)) {
            improves = true;
            break;
          }
        }
      }
      views_[j] = saved;
      if (improves) return false;
    }
    return true;
  }

  const StudentScan& scan_;
  bool prefilter_;
  MechanismRunner runner_;
  std::vector<std::span<const SchoolId>> views_;
  std::vector<std::int32_t> out_;
  std::vector<std::int32_t> base_;
  std::vector<std::int32_t> cache_;
  std::vector<std::uint8_t> achievable_;
  bool achievable_ready_ = false;
  std::vector<std::uint32_t> true_pos_;
};

// Minimum (P_{-i}, type, report) witness per target, whatever the schedule.
std::vector<std::optional<Hit>> run_scan(const StudentScan& scan, const std::vector<SchoolId>& targets,
                                         bool equilibrium, const ScanOptions& options,
                                         std::vector<std::uint64_t>& outer_of_hit) {
  const unsigned threads = detail::resolve_threads(options.threads);
  std::unique_ptr<std::atomic<std::uint64_t>[]> best(new std::atomic<std::uint64_t>[targets.size()]);
  for (std::size_t t = 0; t < targets.size(); ++t) best[t].store(kNone);
  std::vector<std::optional<Hit>> hits(targets.size());
  std::mutex merge;
  std::vector<std::unique_ptr<ScanWorker>> workers(threads);

  if (!scan.types.empty() && !targets.empty()) {
    detail::for_each_chunk(scan.outer, threads, [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
      if (!workers[w]) workers[w] = std::make_unique<ScanWorker>(scan, options.prefilter);
      auto& worker = *workers[w];
      for (std::uint64_t o = begin; o < end; ++o) {
        bool open = false;
        for (std::size_t t = 0; t < targets.size(); ++t) open |= best[t].load(std::memory_order_relaxed) > o;
        if (!open) return;
        worker.load(o);
        for (std::size_t t = 0; t < targets.size(); ++t) {
          if (best[t].load(std::memory_order_relaxed) <= o) continue;
          auto hit = equilibrium ? worker.equilibrium_admission(targets[t]) : worker.admission(targets[t]);
          if (!hit) continue;
          std::lock_guard lock(merge);
          if (o < best[t].load()) {
            best[t].store(o);
            hits[t] = hit;
          }
        }
      }
    });
  }
  outer_of_hit.resize(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) outer_of_hit[t] = best[t].load();
  return hits;
}

ManipulationWitness build_witness(const StudentScan& scan, std::uint64_t o, Hit hit, SchoolId s) {
  ManipulationWitness w;
  w.profile = scan.profile_at(o, hit.first);
  w.student = scan.i;
  w.misreport = scan.reports[scan.report_reps[hit.second]];
  w.target_school = s;
  MechanismRunner runner(*scan.spec, *scan.env);
  w.truthful_outcome = runner.run(w.profile)[scan.i];
  auto reported = w.profile;
  reported[scan.i.value] = w.misreport;
  w.deviating_outcome = runner.run(reported)[scan.i];
  return w;
}

// First improving report per student, or nothing. `views` holds the truthful
// profile on entry and on exit.
std::optional<std::pair<std::uint32_t, std::uint32_t>> first_manipulation(
    MechanismRunner& runner, std::vector<std::span<const SchoolId>>& views, std::span<const Preference* const> truth,
    const std::vector<std::vector<Preference>>& reports, const std::vector<std::vector<std::uint32_t>>& reps,
    std::vector<std::int32_t>& base, std::vector<std::int32_t>& out) {
  runner.run(views, base);
  for (std::uint32_t j = 0; j < views.size(); ++j) {
    const auto current = to_outcome(base[j]);
    const auto saved = views[j];
    for (auto r : reps[j]) {
      views[j] = reports[j][r].ranking();
      runner.run(views, out);
      if (truth[j]->prefers(to_outcome(out[j]), current)) {
        views[j] = saved;
        return std::pair{j, r};
      }
    }
    views[j] = saved;
  }
  return std::nullopt;
}

std::string scope_note(std::size_t envs) {
  return "verdict restricted to the " + std::to_string(envs) + " supplied environment" + (envs == 1 ? "" : "s");
}

}  // namespace

std::optional<ManipulationWitness> find_manipulation(const MechanismSpec& spec, const Problem& p, StudentId i,
                                                     const PreferenceDomain& domain) {
  require_valid(p);
  if (i.value >= p.n()) throw InvalidArgument("student index out of range");
  const auto reports = domain.reports(i, p.m());
  const auto reps = class_representatives(spec, reports);
  check_cap(1 + reps.size(), domain);
  MechanismRunner runner(spec, p.environment);
  auto views = views_of(p.profile);
  std::vector<std::int32_t> out(p.n());
  runner.run(views, out);
  const auto truthful = to_outcome(out[i.value]);
  for (auto r : reps) {
    views[i.value] = reports[r].ranking();
    runner.run(views, out);
    const auto deviating = to_outcome(out[i.value]);
    if (p.profile[i.value].prefers(deviating, truthful)) {
      return ManipulationWitness{p.profile, i, reports[r], truthful, deviating, std::nullopt};
    }
  }
  return std::nullopt;
}

std::optional<ManipulationWitness> is_vulnerable(const MechanismSpec& spec, const Problem& p,
                                                 const PreferenceDomain& domain) {
  require_valid(p);
  check_cap(estimate_vulnerability_evaluations(spec, p.environment, domain), domain);
  for (std::uint32_t i = 0; i < p.n(); ++i) {
    if (auto w = find_manipulation(spec, p, StudentId{i}, domain)) return w;
  }
  return std::nullopt;
}

std::uint64_t estimate_admission_evaluations(const MechanismSpec& spec, const Environment& env, StudentId i,
                                             const PreferenceDomain& domain) {
  return StudentScan(spec, env, i, domain, false, {}).estimate();
}

std::uint64_t estimate_vulnerability_evaluations(const MechanismSpec& spec, const Environment& env,
                                                 const PreferenceDomain& domain) {
  std::uint64_t total = 1;
  for (std::uint32_t j = 0; j < env.student_count; ++j) {
    total = saturating_add(total, class_representatives(spec, domain.reports(StudentId{j}, env.school_count())).size());
  }
  return total;
}

AdmissionVerdict strategyproof_admission(const MechanismSpec& spec, const Environment& env, StudentId i,
                                         SchoolId s, const PreferenceDomain& domain, const ScanOptions& options) {
  require_valid(env);
  if (s.value >= env.school_count()) throw UnknownSchool("school index out of range");
  StudentScan scan(spec, env, i, domain, false, options);
  check_cap(scan.estimate(), domain);
  std::vector<std::uint64_t> outer;
  auto hits = run_scan(scan, {s}, false, options, outer);
  AdmissionVerdict verdict;
  verdict.domain = domain.describe();
  verdict.exhaustive = domain.exhaustive();
  if (hits[0]) {
    verdict.strategyproof = false;
    verdict.witness = build_witness(scan, outer[0], *hits[0], s);
  }
  return verdict;
}

std::vector<SchoolId> SchoolSets::schools_of(StudentId i) const {
  std::vector<SchoolId> out;
  for (std::uint32_t s = 0; s < sp[i.value].size(); ++s) {
    if (sp[i.value][s]) out.push_back(SchoolId{s});
  }
  return out;
}

SchoolSets strategyproof_school_sets(const MechanismSpec& spec, const Environment& env,
                                     const PreferenceDomain& domain, const ScanOptions& options) {
  require_valid(env);
  const auto n = env.student_count;
  const auto m = env.school_count();
  std::vector<std::unique_ptr<StudentScan>> scans;
  std::uint64_t estimate = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    scans.push_back(std::make_unique<StudentScan>(spec, env, StudentId{i}, domain, false, options));
    estimate = saturating_add(estimate, scans.back()->estimate());
  }
  check_cap(estimate, domain);

  std::vector<SchoolId> all(m);
  for (std::uint32_t s = 0; s < m; ++s) all[s] = SchoolId{s};
  SchoolSets sets;
  sets.sp.assign(n, std::vector<bool>(m, true));
  sets.witnesses.assign(n, std::vector<std::optional<ManipulationWitness>>(m));
  for (std::uint32_t i = 0; i < n; ++i) {
    std::vector<std::uint64_t> outer;
    auto hits = run_scan(*scans[i], all, false, options, outer);
    for (std::uint32_t s = 0; s < m; ++s) {
      if (!hits[s]) continue;
      sets.sp[i][s] = false;
      sets.witnesses[i][s] = build_witness(*scans[i], outer[s], *hits[s], SchoolId{s});
    }
  }
  return sets;
}

ImmunityVerdict immunity_verdict(const SchoolSets& a, const SchoolSets& b) {
  bool b_in_a = true;
  bool a_in_b = true;
  for (std::size_t i = 0; i < a.sp.size(); ++i) {
    for (std::size_t s = 0; s < a.sp[i].size(); ++s) {
      if (b.sp[i][s] && !a.sp[i][s]) b_in_a = false;
      if (a.sp[i][s] && !b.sp[i][s]) a_in_b = false;
    }
  }
  if (b_in_a && a_in_b) return ImmunityVerdict::Equal;
  if (b_in_a) return ImmunityVerdict::AMoreImmune;
  if (a_in_b) return ImmunityVerdict::BMoreImmune;
  return ImmunityVerdict::Incomparable;
}

ComparisonReport compare_immunity(const MechanismSpec& a, const MechanismSpec& b, const std::vector<Environment>& envs,
                                  const PreferenceDomain& domain, const ScanOptions& options) {
  ComparisonReport report;
  report.domain = domain.describe();
  report.exhaustive = domain.exhaustive();
  report.scope = scope_note(envs.size());
  bool b_in_a = true;
  bool a_in_b = true;
  for (const auto& env : envs) {
    EnvironmentImmunity e;
    e.a = strategyproof_school_sets(a, env, domain, options);
    e.b = a == b ? e.a : strategyproof_school_sets(b, env, domain, options);
    e.verdict = immunity_verdict(e.a, e.b);
    for (std::uint32_t i = 0; i < e.a.sp.size(); ++i) {
      for (std::uint32_t s = 0; s < e.a.sp[i].size(); ++s) {
        if (e.a.sp[i][s] == e.b.sp[i][s]) continue;
        const bool sp_a = e.a.sp[i][s];
        if (sp_a) a_in_b = false;
        else b_in_a = false;
        const auto& w = sp_a ? e.b.witnesses[i][s] : e.a.witnesses[i][s];
        e.differences.push_back(SetDifference{StudentId{i}, SchoolId{s}, sp_a, *w});
      }
    }
    report.environments.push_back(std::move(e));
  }
  if (b_in_a && a_in_b) report.verdict = ImmunityVerdict::Equal;
  else if (b_in_a) report.verdict = ImmunityVerdict::AMoreImmune;
  else if (a_in_b) report.verdict = ImmunityVerdict::BMoreImmune;
  else report.verdict = ImmunityVerdict::Incomparable;
  return report;
}

namespace {

EnvironmentManipulability manipulability_in(const MechanismSpec& a, const MechanismSpec& b, const Environment& env,
                                            const PreferenceDomain& domain, const ScanOptions& options) {
  require_valid(env);
  const auto n = env.student_count;
  const auto m = env.school_count();
  std::vector<std::vector<Preference>> types(n), reports(n);
  std::vector<std::vector<std::uint32_t>> reps_a(n), reps_b(n);
  std::uint64_t profiles = 1;
  std::uint64_t per_profile = 2;
  for (std::uint32_t j = 0; j < n; ++j) {
    types[j] = domain.types(StudentId{j}, m);
    reports[j] = domain.reports(StudentId{j}, m);
    reps_a[j] = class_representatives(a, reports[j]);
    reps_b[j] = class_representatives(b, reports[j]);
    profiles = saturating_mul(profiles, types[j].size());
    per_profile = saturating_add(per_profile, reps_a[j].size() + reps_b[j].size());
  }
  check_cap(saturating_mul(profiles, per_profile), domain);

  EnvironmentManipulability result;
  result.profiles = profiles;
  std::uint64_t first_only_a = kNone;
  std::uint64_t first_only_b = kNone;
  std::mutex merge;

  auto decode = [&](std::uint64_t idx, std::vector<const Preference*>& truth) {
    for (std::size_t j = n; j-- > 0;) {
      truth[j] = &types[j][idx % types[j].size()];
      idx /= types[j].size();
    }
  };

  struct Worker {
    MechanismRunner ra, rb;
    std::vector<std::span<const SchoolId>> views;
    std::vector<const Preference*> truth;
    std::vector<std::int32_t> base, out;
  };
  const unsigned threads = detail::resolve_threads(options.threads);
  std::vector<std::unique_ptr<Worker>> workers(threads);

  detail::for_each_chunk(profiles, threads, [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
    if (!workers[w]) {
      workers[w].reset(new Worker{MechanismRunner(a, env), MechanismRunner(b, env),
                                  std::vector<std::span<const SchoolId>>(n), std::vector<const Preference*>(n),
                                  std::vector<std::int32_t>(n), std::vector<std::int32_t>(n)});
    }
    auto& wk = *workers[w];
    std::uint64_t va = 0, vb = 0, oa = 0, ob = 0, fa = kNone, fb = kNone;
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      decode(idx, wk.truth);
      for (std::size_t j = 0; j < n; ++j) wk.views[j] = wk.truth[j]->ranking();
      const bool in_a = first_manipulation(wk.ra, wk.views, wk.truth, reports, reps_a, wk.base, wk.out).has_value();
      const bool in_b = first_manipulation(wk.rb, wk.views, wk.truth, reports, reps_b, wk.base, wk.out).has_value();
      va += in_a;
      vb += in_b;
      if (in_a && !in_b) {
        ++oa;
        fa = std::min(fa, idx);
      }
      if (in_b && !in_a) {
        ++ob;
        fb = std::min(fb, idx);
      }
    }
    std::lock_guard lock(merge);
    result.vulnerable_a += va;
    result.vulnerable_b += vb;
    result.only_a += oa;
    result.only_b += ob;
    first_only_a = std::min(first_only_a, fa);
    first_only_b = std::min(first_only_b, fb);
  });

  auto example = [&](std::uint64_t idx, const MechanismSpec& spec) {
    std::vector<const Preference*> truth(n);
    decode(idx, truth);
    Problem p{env, {}};
    for (auto* t : truth) p.profile.push_back(*t);
    return is_vulnerable(spec, p, domain);
  };
  if (first_only_a != kNone) result.only_a_example = example(first_only_a, a);
  if (first_only_b != kNone) result.only_b_example = example(first_only_b, b);

  if (result.only_a == 0 && result.only_b == 0) result.verdict = ManipulabilityVerdict::Equal;
  else if (result.only_a == 0) result.verdict = ManipulabilityVerdict::ALess;
  else if (result.only_b == 0) result.verdict = ManipulabilityVerdict::BLess;
  else result.verdict = ManipulabilityVerdict::Incomparable;
  return result;
}

}  // namespace

ManipulabilityReport compare_manipulability(const MechanismSpec& a, const MechanismSpec& b,
                                            const std::vector<Environment>& envs, const PreferenceDomain& domain,
                                            const ScanOptions& options) {
  ManipulabilityReport report;
  report.domain = domain.describe();
  report.exhaustive = domain.exhaustive();
  report.scope = scope_note(envs.size());
  bool a_in_b = true;
  bool b_in_a = true;
  for (const auto& env : envs) {
    auto e = manipulability_in(a, b, env, domain, options);
    a_in_b &= e.only_a == 0;
    b_in_a &= e.only_b == 0;
    report.environments.push_back(std::move(e));
  }
  if (a_in_b && b_in_a) report.verdict = ManipulabilityVerdict::Equal;
  else if (a_in_b) report.verdict = ManipulabilityVerdict::ALess;
  else if (b_in_a) report.verdict = ManipulabilityVerdict::BLess;
  else report.verdict = ManipulabilityVerdict::Incomparable;
  return report;
}

NashVerdict is_nash_equilibrium(const MechanismSpec& spec, const PreferenceProfile& true_profile,
                                const PreferenceProfile& reported, const Environment& env,
                                const PreferenceDomain& domain) {
  require_valid(Problem{env, true_profile});
  require_valid(Problem{env, reported});
  const auto n = env.student_count;
  std::vector<std::vector<Preference>> reports(n);
  std::vector<std::vector<std::uint32_t>> reps(n);
  std::uint64_t estimate = 1;
  for (std::uint32_t j = 0; j < n; ++j) {
    reports[j] = domain.reports(StudentId{j}, env.school_count());
    reps[j] = class_representatives(spec, reports[j]);
    estimate = saturating_add(estimate, reps[j].size());
  }
  check_cap(estimate, domain);

  MechanismRunner runner(spec, env);
  auto views = views_of(reported);
  std::vector<const Preference*> truth;
  for (const auto& t : true_profile) truth.push_back(&t);
  std::vector<std::int32_t> base(n), out(n);
  auto hit = first_manipulation(runner, views, truth, reports, reps, base, out);
  NashVerdict verdict;
  if (hit) {
    const auto [j, r] = *hit;
    verdict.equilibrium = false;
    verdict.deviator = StudentId{j};
    verdict.deviation = reports[j][r];
    verdict.current = to_outcome(base[j]);
    auto deviated = reported;
    deviated[j] = reports[j][r];
    verdict.improved = runner.run(deviated)[StudentId{j}];
  }
  return verdict;
}

EquilibriumAdmissionVerdict strategyproof_admission_in_equilibrium(const MechanismSpec& spec, const Environment& env,
                                                                   StudentId i, SchoolId s,
                                                                   const PreferenceDomain& domain,
                                                                   const ScanOptions& options) {
  require_valid(env);
  if (s.value >= env.school_count()) throw UnknownSchool("school index out of range");
  StudentScan scan(spec, env, i, domain, true, options);
  check_cap(scan.estimate(), domain);
  std::vector<std::uint64_t> outer;
  auto hits = run_scan(scan, {s}, true, options, outer);
  EquilibriumAdmissionVerdict verdict;
  verdict.domain = domain.describe();
  verdict.exhaustive = domain.exhaustive();
  if (hits[0]) {
    verdict.strategyproof = false;
    verdict.witness = build_witness(scan, outer[0], *hits[0], s);
    auto reported = verdict.witness->profile;
    reported[i.value] = verdict.witness->misreport;
    verdict.certificate = is_nash_equilibrium(spec, verdict.witness->profile, reported, env, domain);
    if (!verdict.certificate->equilibrium) throw Error("internal: equilibrium witness failed its certificate");
  }
  return verdict;
}

std::uint64_t sd_guarantee(const Environment& env, std::size_t k) {
  require_valid(env);
  if (!has_common_priority(env)) throw CommonPriorityViolation();
  if (k == 0 || k > env.school_count()) throw InvalidArgument("k must satisfy 1 <= k <= number of schools");
  auto caps = env.capacities;
  std::sort(caps.begin(), caps.end());
  return std::accumulate(caps.begin(), caps.begin() + static_cast<std::ptrdiff_t>(k), std::uint64_t{0});
}

SdCharacterization sd_vulnerability_characterization(const Problem& p, std::size_t k,
                                                     const PreferenceDomain& domain) {
  require_valid(p);
  if (!has_common_priority(p.environment)) throw CommonPriorityViolation();
  SdCharacterization c;
  c.left = !is_vulnerable(MechanismSpec::sd(k), p, domain).has_value();
  c.right = apply_mechanism(MechanismSpec::sd(k), p) == apply_mechanism(MechanismSpec::sd(), p);
  c.agrees = c.left == c.right;
  return c;
}

}  // namespace matchlab
