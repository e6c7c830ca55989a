/*
 * Copyright 2026 The Fairsynth Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fairsynth/synthesis.h"

#include <algorithm>
#include <atomic>
#include <map>
#include <thread>

#include "absl/strings/str_cat.h"

namespace fairsynth {
namespace {

std::vector<FeatureId> ConstrainedFeatures(const Itemset& itemset) {
  std::vector<FeatureId> out;
  for (const auto& entry : itemset.region().entries()) {
    out.push_back(entry.first);
  }
  return out;
}

// Fair itemsets bucketed by the set of features they constrain. A condition
// can only contain a region that constrains a superset of its features, so
// lookups skip every bucket whose key is not a subset.
class ConditionIndex {
 public:
  void Add(const Itemset* itemset) {
    buckets_[ConstrainedFeatures(*itemset)].push_back(itemset);
  }

  // A condition other than `self` whose region contains `candidate`'s.
  bool Subsumes(const Itemset& candidate,
                const Itemset* self = nullptr) const {
    const std::vector<FeatureId> features = ConstrainedFeatures(candidate);
    for (const auto& [key, members] : buckets_) {
      if (!std::includes(features.begin(), features.end(), key.begin(),
                         key.end())) {
        continue;
      }
      for (const Itemset* m : members) {
        if (m != self && candidate.region().IsSubsetOf(m->region())) {
          return true;
        }
      }
    }
    return false;
  }

 private:
  std::map<std::vector<FeatureId>, std::vector<const Itemset*>> buckets_;
};

struct Outcome {
  Itemset itemset;
  bool fair = false;
};

// Keeps the members of `found` (one iteration's fair itemsets, in order) that
// are not contained in another member: a strictly larger one, or an equal one
// found earlier.
std::vector<Itemset> DropSubsumed(std::vector<Itemset> found) {
  std::vector<bool> keep(found.size(), true);
  for (size_t i = 0; i < found.size(); ++i) {
    for (size_t j = 0; j < found.size() && keep[i]; ++j) {
      if (i == j || !keep[j]) continue;
      if (!found[i].region().IsSubsetOf(found[j].region())) continue;
      const bool equal = found[j].region().IsSubsetOf(found[i].region());
      if (!equal || j < i) keep[i] = false;
    }
  }
  std::vector<Itemset> out;
  for (size_t i = 0; i < found.size(); ++i) {
    if (keep[i]) out.push_back(std::move(found[i]));
  }
  return out;
}

// Same result as DropSubsumed, without the quadratic scan for large sets.
std::vector<Itemset> DropSubsumedIndexed(std::vector<Itemset> found) {
  if (found.size() < 64) return DropSubsumed(std::move(found));
  std::map<std::vector<FeatureId>, std::vector<size_t>> buckets;
  std::vector<std::vector<FeatureId>> features(found.size());
  for (size_t i = 0; i < found.size(); ++i) {
    features[i] = ConstrainedFeatures(found[i]);
    buckets[features[i]].push_back(i);
  }
  std::vector<bool> keep(found.size(), true);
  for (size_t i = 0; i < found.size(); ++i) {
    for (const auto& [key, members] : buckets) {
      if (!keep[i]) break;
      if (!std::includes(features[i].begin(), features[i].end(), key.begin(),
                         key.end())) {
        continue;
      }
      for (size_t j : members) {
        if (i == j) continue;
        if (!found[i].region().IsSubsetOf(found[j].region())) continue;
        const bool equal = found[j].region().IsSubsetOf(found[i].region());
        // An equal region found later never removes an earlier one, and the
        // earlier one always survives, so ordering decisions are stable.
        if (!equal || j < i) {
          keep[i] = false;
          break;
        }
      }
    }
  }
  std::vector<Itemset> out;
  for (size_t i = 0; i < found.size(); ++i) {
    if (keep[i]) out.push_back(std::move(found[i]));
  }
  return out;
}

// Runs `body(row)` for rows 0..n-1 on up to `threads` workers.
template <typename Body>
void ParallelFor(size_t n, int threads, Body&& body) {
  const size_t workers =
      std::min<size_t>(std::max(threads, 1), std::max<size_t>(n, 1));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i; (i = next.fetch_add(1)) < n;) body(i);
  };
  std::vector<std::thread> pool;
  for (size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
}

bool SamePrefix(const Itemset& a, const Itemset& b) {
  const auto ai = a.items();
  const auto bi = b.items();
  for (size_t i = 0; i + 1 < ai.size(); ++i) {
    if (!(ai[i] == bi[i])) return false;
  }
  return true;
}

}  // namespace

std::vector<Itemset> FormulaSet::UpTo(int k) const {
  std::vector<Itemset> out;
  for (size_t i = 0; i < itemsets.size(); ++i) {
    if (found_at[i] <= k) out.push_back(itemsets[i]);
  }
  return out;
}

bool FormulaSet::Covers(std::span<const double> x) const {
  return std::any_of(itemsets.begin(), itemsets.end(),
                     [&](const Itemset& i) { return i.region().Contains(x); });
}

FormulaSet SynthesizeFrom(const UnstableSet& unstable,
                          const FeatureMetadata& metadata,
                          const SynthesisOptions& options) {
  FormulaSet result;
  if (unstable.empty()) {
    result.itemsets.emplace_back();
    result.found_at.push_back(0);
    result.converged = true;
    return result;
  }

  auto accept = [&result](std::vector<Itemset> found, int iteration) {
    found = DropSubsumedIndexed(std::move(found));
    for (Itemset& f : found) {
      result.itemsets.push_back(std::move(f));
      result.found_at.push_back(iteration);
    }
    return found.size();
  };

  // Iteration 1: singletons.
  std::vector<Itemset> candidates;
  {
    std::vector<Itemset> fair;
    for (const Itemset& singleton : GenItemsets(unstable, metadata)) {
      FairCheck check = CheckFair(singleton, unstable, options.use_id_cache);
      (check.fair ? fair : candidates).push_back(std::move(check.itemset));
    }
    IterationStats stats;
    stats.iteration = 1;
    stats.added = accept(std::move(fair), 1);
    stats.candidates = candidates.size();
    result.per_iteration.push_back(stats);
    result.iterations = 1;
  }

  while (!candidates.empty()) {
    if (options.max_iters && result.iterations >= *options.max_iters) break;
    const int iteration = result.iterations + 1;

    ConditionIndex known;
    for (const Itemset& f : result.itemsets) known.Add(&f);

    // Each row meets candidates[row] with every later candidate of its prefix
    // group. Rows are independent and merged in order afterwards.
    std::vector<size_t> group_end(candidates.size());
    for (size_t i = candidates.size(); i-- > 0;) {
      group_end[i] = (i + 1 < candidates.size() &&
                      SamePrefix(candidates[i], candidates[i + 1]))
                         ? group_end[i + 1]
                         : i + 1;
    }
    std::vector<std::vector<Outcome>> rows(candidates.size());
    std::vector<size_t> meets(candidates.size(), 0);
    std::atomic<size_t> produced{0};
    std::atomic<bool> exceeded{false};
    ParallelFor(candidates.size(), options.threads, [&](size_t row) {
      for (size_t j = row + 1; j < group_end[row]; ++j) {
        if (exceeded.load(std::memory_order_relaxed)) return;
        std::optional<Itemset> meet =
            Meet(candidates[row], candidates[j], metadata);
        if (!meet) continue;
        ++meets[row];
        if (known.Subsumes(*meet)) continue;
        FairCheck check = CheckFair(*meet, unstable, options.use_id_cache);
        if (!check.fair && produced.fetch_add(1) + 1 > options.max_candidates) {
          exceeded = true;
          return;
        }
        rows[row].push_back({std::move(check.itemset), check.fair});
      }
    });
    if (exceeded) {
      result.resource_limit_hit = true;
      result.warning = absl::StrCat(
          "candidate limit of ", options.max_candidates,
          " exceeded in iteration ", iteration,
          "; returning the conditions of iterations 1..", result.iterations);
      break;
    }

    std::vector<Itemset> fair;
    std::vector<Itemset> next;
    IterationStats stats;
    stats.iteration = iteration;
    for (size_t row = 0; row < rows.size(); ++row) {
      stats.meets += meets[row];
      for (Outcome& o : rows[row]) {
        (o.fair ? fair : next).push_back(std::move(o.itemset));
      }
    }
    candidates.clear();
    rows.clear();
    stats.added = accept(std::move(fair), iteration);
    stats.candidates = next.size();
    result.per_iteration.push_back(stats);
    result.iterations = iteration;
    candidates = std::move(next);
  }
  result.converged = candidates.empty() && !result.resource_limit_hit;
  result.candidates = std::move(candidates);
  return result;
}

absl::StatusOr<FormulaSet> Synthesize(const Ensemble& ensemble,
                                      std::span<const FeatureId> sensitive,
                                      const SynthesisOptions& options,
                                      const AnalysisOptions& analysis) {
  auto unstable = Analyze(ensemble, sensitive, analysis);
  if (!unstable.ok()) return unstable.status();
  return SynthesizeFrom(*unstable, ensemble.metadata(), options);
}

}  // namespace fairsynth
