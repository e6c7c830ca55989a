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

// Hand-written models and unstable sets shared by the tests.

#ifndef FAIRSYNTH_TESTS_TESTING_FIXTURES_H_
#define FAIRSYNTH_TESTS_TESTING_FIXTURES_H_

#include "fairsynth/itemsets.h"
#include "fairsynth/model.h"
#include "fairsynth/stability.h"

namespace fairsynth::testing {

// Label ids of the two-feature example tree.
inline constexpr LabelId kPlus = 0;   // "+1"
inline constexpr LabelId kMinus = 1;  // "-1"

// Two numeric features x1 (id 0) and x2 (id 1).
FeatureMetadata TwoNumericFeatures();

// x1 <= 8 ? (x2 <= 6 ? +1 : -1) : (x2 <= 7 ? +1 : -1)
Tree ExampleTree();
Ensemble ExampleEnsemble(int copies = 1);
Ensemble ConstantEnsemble(LabelId label = 0);

// H1 = <(1,5], (3,8]>, H2 = <(4,7], (2,6]> with ids 0 and 1.
UnstableSet TwoRectangleUnstableSet();

HyperRectangle Box(std::initializer_list<std::pair<FeatureId, Interval>> sides);
Interval Iv(double lo, double hi);
Itemset Items(std::initializer_list<Item> items);

}  // namespace fairsynth::testing

#endif  // FAIRSYNTH_TESTS_TESTING_FIXTURES_H_
