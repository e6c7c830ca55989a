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

// Data-independent stability analysis.
//
// The ensemble partitions the feature space into equivalence classes: boxes
// whose instances reach the same leaf in every tree and hence share a
// prediction. Two classes with different labels whose boxes overlap on every
// non-sensitive feature, and whose sensitive intervals differ, contain a pair
// of instances that differ only on sensitive features yet are classified
// differently. Every class taking part in such a pair is reported as
// potentially unstable; the union of the reported boxes covers every instance
// that can suffer causal discrimination.

#ifndef FAIRSYNTH_STABILITY_H_
#define FAIRSYNTH_STABILITY_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "fairsynth/geometry.h"
#include "fairsynth/model.h"

namespace fairsynth {

inline constexpr size_t kDefaultMaxClasses = 1'000'000;

struct EquivalenceClass {
  HyperRectangle region;
  LabelId label = 0;
};

// Rectangles over-approximating the region where the ensemble may
// discriminate. Rectangle i carries id i.
struct UnstableSet {
  std::vector<HyperRectangle> rectangles;

  size_t size() const { return rectangles.size(); }
  bool empty() const { return rectangles.empty(); }
  bool Contains(std::span<const double> x) const;
};

// Builds an UnstableSet from arbitrary rectangles: drops exact duplicates,
// keeps first occurrences in order and assigns dense ids.
UnstableSet MakeUnstableSet(std::vector<HyperRectangle> rectangles);

// Enumerates the leaf combinations of the ensemble tree by tree (left before
// right), abandoning partial combinations whose boxes are already empty.
// Fails with ResourceExhausted once more than `max_classes` classes exist.
absl::StatusOr<std::vector<EquivalenceClass>> EnumerateEquivalenceClasses(
    const Ensemble& ensemble, size_t max_classes = kDefaultMaxClasses);

struct AnalysisOptions {
  // Bound on the number of unstable classes kept.
  size_t max_classes = kDefaultMaxClasses;
};

// Unstable classes in enumeration order. Pairs are found by walking the
// ensemble for both members of a pair at once, pruning as soon as their
// boxes stop overlapping on a non-sensitive feature or both majorities are
// settled on the same label, so neither the full class list nor the square
// of its size is ever needed. Fails with ResourceExhausted once more than
// `max_classes` unstable classes exist.
absl::StatusOr<UnstableSet> Analyze(const Ensemble& ensemble,
                                    std::span<const FeatureId> sensitive,
                                    const AnalysisOptions& options = {});

// Reference implementation: compares every pair of classes. Produces the same
// set, in the same order, as Analyze() on the classes it was given.
UnstableSet AnalyzeClassesPairwise(std::span<const EquivalenceClass> classes,
                                   std::span<const FeatureId> sensitive,
                                   size_t num_features);

// Finite stand-ins for flip_S(x): every instance obtained from x by changing
// sensitive features only, up to ensemble equivalence. Numeric sensitive
// features range over one value per threshold cell plus the thresholds
// themselves; binary features over {0, 1}; one-hot columns over assignments
// that keep exactly one active column per group.
class FlipSet {
 public:
  FlipSet(const Ensemble& ensemble, std::span<const FeatureId> sensitive);

  std::vector<Instance> Representatives(std::span<const double> x) const;

  // Calls `visit` on each representative until it returns false. Returns
  // false iff some call returned false.
  template <typename Visitor>
  bool ForEach(std::span<const double> x, Visitor&& visit) const;

  bool empty() const { return axes_.empty(); }

 private:
  struct Axis {
    // One column for numeric/binary axes; the sensitive members of a group
    // for one-hot axes.
    std::vector<FeatureId> features;
    bool one_hot = false;
    // Candidate values for numeric/binary axes.
    std::vector<double> values;
  };

  // Options for one axis at x, each as a list of column values.
  std::vector<std::vector<double>> AxisOptions(const Axis& axis,
                                               std::span<const double> x) const;

  const FeatureMetadata* metadata_;
  std::vector<Axis> axes_;
};

std::vector<Instance> FlipSetRepresentatives(
    const Ensemble& ensemble, std::span<const FeatureId> sensitive,
    std::span<const double> x);

// Implementation details.

template <typename Visitor>
bool FlipSet::ForEach(std::span<const double> x, Visitor&& visit) const {
  std::vector<std::vector<std::vector<double>>> options;
  options.reserve(axes_.size());
  for (const Axis& axis : axes_) options.push_back(AxisOptions(axis, x));

  Instance z(x.begin(), x.end());
  std::vector<size_t> pos(axes_.size(), 0);
  while (true) {
    for (size_t a = 0; a < axes_.size(); ++a) {
      const auto& choice = options[a][pos[a]];
      for (size_t i = 0; i < axes_[a].features.size(); ++i) {
        z[axes_[a].features[i]] = choice[i];
      }
    }
    if (!visit(static_cast<const Instance&>(z))) return false;
    size_t a = 0;
    for (; a < axes_.size(); ++a) {
      if (++pos[a] < options[a].size()) break;
      pos[a] = 0;
    }
    if (a == axes_.size()) return true;
  }
}

}  // namespace fairsynth

#endif  // FAIRSYNTH_STABILITY_H_
