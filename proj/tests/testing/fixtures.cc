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

#include "testing/fixtures.h"

#include <cassert>

namespace fairsynth::testing {

FeatureMetadata TwoNumericFeatures() {
  return FeatureMetadata({{0, "x1", FeatureKind::kNumeric, std::nullopt},
                          {1, "x2", FeatureKind::kNumeric, std::nullopt}});
}

Tree ExampleTree() {
  return Tree::Split(
      0, 8.0, Tree::Split(1, 6.0, Tree::Leaf(kPlus), Tree::Leaf(kMinus)),
      Tree::Split(1, 7.0, Tree::Leaf(kPlus), Tree::Leaf(kMinus)));
}

Ensemble ExampleEnsemble(int copies) {
  std::vector<Tree> trees(copies, ExampleTree());
  return Ensemble(std::move(trees), {"+1", "-1"}, TwoNumericFeatures());
}

Ensemble ConstantEnsemble(LabelId label) {
  return Ensemble({Tree::Leaf(label)}, {"neg", "pos"}, TwoNumericFeatures());
}

Interval Iv(double lo, double hi) {
  auto i = Interval::Make(lo, hi);
  assert(i.has_value());
  return *i;
}

HyperRectangle Box(
    std::initializer_list<std::pair<FeatureId, Interval>> sides) {
  HyperRectangle h;
  for (const auto& [f, i] : sides) h.Restrict(f, i);
  return h;
}

UnstableSet TwoRectangleUnstableSet() {
  return MakeUnstableSet({Box({{0, Iv(1, 5)}, {1, Iv(3, 8)}}),
                          Box({{0, Iv(4, 7)}, {1, Iv(2, 6)}})});
}

Itemset Items(std::initializer_list<Item> items) {
  auto itemset = Itemset::FromItems(std::vector<Item>(items));
  assert(itemset.has_value());
  return *itemset;
}

}  // namespace fairsynth::testing
