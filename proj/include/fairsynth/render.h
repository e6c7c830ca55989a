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

// Human-readable rendering of fairness conditions.

#ifndef FAIRSYNTH_RENDER_H_
#define FAIRSYNTH_RENDER_H_

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fairsynth/itemsets.h"
#include "fairsynth/model.h"

namespace fairsynth {

// lo < name <= hi, with one-sided forms for infinite ends.
struct RangeConjunct {
  FeatureId feature = 0;
  Interval range;
  friend bool operator==(const RangeConjunct&, const RangeConjunct&) = default;
};

// name = value for a binary column whose range admits exactly one of {0, 1}.
struct BinaryConjunct {
  FeatureId feature = 0;
  int value = 0;
  friend bool operator==(const BinaryConjunct&,
                         const BinaryConjunct&) = default;
};

// group = v1 or group = v2 ..., over the active column of a one-hot group.
struct CategoryInConjunct {
  std::string group;
  std::vector<FeatureId> columns;
  friend bool operator==(const CategoryInConjunct&,
                         const CategoryInConjunct&) = default;
};

// group != v1 and group != v2 ...
struct CategoryNotInConjunct {
  std::string group;
  std::vector<FeatureId> columns;
  friend bool operator==(const CategoryNotInConjunct&,
                         const CategoryNotInConjunct&) = default;
};

using Conjunct = std::variant<RangeConjunct, BinaryConjunct,
                              CategoryInConjunct, CategoryNotInConjunct>;

struct RenderedFormula {
  std::vector<Conjunct> conjuncts;
  // Indices of the itemsets merged into this formula.
  std::vector<size_t> sources;
  std::string text;

  // Evaluates the formula on a one-hot-consistent instance.
  bool Matches(std::span<const double> x) const;
};

// Renders each itemset as a conjunction of per-feature predicates, then
// merges itemsets that differ only in the value of one categorical equality
// into a single formula with a disjunction over those values. On instances
// with valid one-hot groups, the formulas cover exactly the union of the
// itemsets.
std::vector<RenderedFormula> RenderFormulas(std::span<const Itemset> itemsets,
                                            const FeatureMetadata& metadata);

std::string RenderConjunct(const Conjunct& conjunct,
                           const FeatureMetadata& metadata);

}  // namespace fairsynth

#endif  // FAIRSYNTH_RENDER_H_
