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

// Synthesis of sufficient conditions for the absence of causal
// discrimination.
//
// Starting from the singleton itemsets that describe the outside of each
// unstable rectangle, the search keeps every itemset disjoint from all of U as
// a fairness condition and combines the remaining candidates Apriori-style:
// candidates sharing their first k-1 items are met pairwise into (k+1)-item
// candidates. Itemsets already implied by a known condition are skipped. Each
// iteration grows the itemsets by one item; the search may be cut short after
// any iteration without losing soundness.

#ifndef FAIRSYNTH_SYNTHESIS_H_
#define FAIRSYNTH_SYNTHESIS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "fairsynth/itemsets.h"
#include "fairsynth/model.h"
#include "fairsynth/stability.h"

namespace fairsynth {

// Candidates take about 1 KB each with their id lists; the default keeps a
// run within a couple of gigabytes.
inline constexpr size_t kDefaultMaxCandidates = 2'000'000;

struct SynthesisOptions {
  // Nullopt runs until no candidate is left.
  std::optional<int> max_iters;
  size_t max_candidates = kDefaultMaxCandidates;
  // Worker threads for the candidate map; the output does not depend on it.
  int threads = 1;
  // When false every fairness check scans all of U.
  bool use_id_cache = true;
};

struct IterationStats {
  int iteration = 0;
  size_t added = 0;         // Conditions kept after this iteration.
  size_t candidates = 0;    // Candidates carried to the next iteration.
  size_t meets = 0;         // Meets that produced an itemset.
};

struct FormulaSet {
  std::vector<Itemset> itemsets;
  // Iteration in which itemsets[i] was found; 0 for the TRUE condition.
  std::vector<int> found_at;
  std::vector<IterationStats> per_iteration;
  // Candidates still open when the search stopped; empty iff converged.
  std::vector<Itemset> candidates;
  int iterations = 0;
  bool converged = false;
  // Set when the candidate limit stopped the run; the last, incomplete
  // iteration is discarded.
  bool resource_limit_hit = false;
  std::string warning;

  size_t size() const { return itemsets.size(); }
  // Conditions found in iterations 1..k (plus TRUE).
  std::vector<Itemset> UpTo(int k) const;
  bool Covers(std::span<const double> x) const;
};

// Runs the search on a given unstable set. An empty U yields the single
// condition TRUE after iteration 0.
FormulaSet SynthesizeFrom(const UnstableSet& unstable,
                          const FeatureMetadata& metadata,
                          const SynthesisOptions& options = {});

// Analyze() followed by SynthesizeFrom().
absl::StatusOr<FormulaSet> Synthesize(const Ensemble& ensemble,
                                      std::span<const FeatureId> sensitive,
                                      const SynthesisOptions& options = {},
                                      const AnalysisOptions& analysis = {});

}  // namespace fairsynth

#endif  // FAIRSYNTH_SYNTHESIS_H_
