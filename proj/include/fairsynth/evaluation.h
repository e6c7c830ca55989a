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

// Scores, coverage curves, ranking and the brute-force discrimination oracle.

#ifndef FAIRSYNTH_EVALUATION_H_
#define FAIRSYNTH_EVALUATION_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "fairsynth/itemsets.h"
#include "fairsynth/model.h"
#include "fairsynth/stability.h"
#include "fairsynth/synthesis.h"

namespace fairsynth {

enum class Provenance { kTest, kRandom, kTrain, kGrid };

struct InstanceSet {
  std::vector<Instance> instances;
  std::optional<std::vector<LabelId>> labels;
  Provenance provenance = Provenance::kTest;

  size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }
};

// Every instance has one value per feature and every one-hot group has
// exactly one active column.
absl::Status ValidateInstances(const InstanceSet& data,
                               const FeatureMetadata& metadata);

// Instances inside some rectangle of U.
size_t CountUnstable(const UnstableSet& unstable, const InstanceSet& data);
// Instances inside the region of some itemset.
size_t CountCovered(std::span<const Itemset> conditions,
                    const InstanceSet& data);

// d: fraction of instances inside U. Fails on an empty set.
absl::StatusOr<double> ScoreD(const UnstableSet& unstable,
                              const InstanceSet& data);
// d~: fraction of instances not covered by any condition. Fails on an empty
// set.
absl::StatusOr<double> ScoreDTilde(std::span<const Itemset> conditions,
                                   const InstanceSet& data);

// Fraction of labeled instances the ensemble predicts correctly; nullopt
// without labels.
std::optional<double> Accuracy(const Ensemble& ensemble,
                               const InstanceSet& data);

// Decides causal discrimination at x by trying every flip-set representative.
// Tree predictions depend only on which threshold cell each value falls in,
// so the finite representatives are exhaustive.
class DiscriminationOracle {
 public:
  DiscriminationOracle(const Ensemble& ensemble,
                       std::span<const FeatureId> sensitive);

  bool IsDiscriminated(std::span<const double> x) const;

 private:
  const Ensemble* ensemble_;
  FlipSet flips_;
};

bool OracleIsDiscriminated(const Ensemble& ensemble,
                           std::span<const FeatureId> sensitive,
                           std::span<const double> x);

struct CoveragePoint {
  int iteration = 0;
  size_t covered = 0;  // Fair instances covered by the conditions so far.
  size_t fair = 0;     // Instances the oracle finds non-discriminated.
  double fraction = 1.0;
};

// Coverage of the oracle-fair instances of `data` by the conditions found in
// iterations 1..k, for k = 1..k_max. With no fair instance the fraction is 1.
std::vector<CoveragePoint> CoverageCurve(const FormulaSet& formulas,
                                         const DiscriminationOracle& oracle,
                                         const InstanceSet& data, int k_max);

// Runs the synthesis for k_max iterations and reports its coverage curve.
absl::StatusOr<std::vector<CoveragePoint>> CoverageCurve(
    const Ensemble& ensemble, std::span<const FeatureId> sensitive,
    const InstanceSet& data, int k_max, SynthesisOptions options = {});

struct RankedCondition {
  size_t index = 0;     // Position in the ranked condition list.
  size_t marginal = 0;  // Instances newly covered when selected.
  size_t covered = 0;   // Total covered by this and the earlier selections.
};

// Greedy ranking by marginal coverage of `data`: repeatedly picks the
// condition covering the most still-uncovered instances, ties going to the
// canonically smaller itemset. Stops after k picks or once nothing new is
// covered.
std::vector<RankedCondition> TopKGreedy(std::span<const Itemset> conditions,
                                        const InstanceSet& data, size_t k);

// Numeric features uniform in [0, 1], binary features uniform in {0, 1}, one
// active column per one-hot group chosen uniformly. Deterministic in `seed`.
InstanceSet GenRandomInstances(const FeatureMetadata& metadata, size_t n,
                               uint64_t seed);

// Reads a preprocessed CSV: a header naming the features in metadata order,
// optionally followed by a "label" column holding label names or ids.
absl::StatusOr<InstanceSet> ReadDatasetCsv(const std::string& path,
                                           const Ensemble& ensemble,
                                           Provenance provenance);

}  // namespace fairsynth

#endif  // FAIRSYNTH_EVALUATION_H_
