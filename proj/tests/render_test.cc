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

#include "fairsynth/render.h"

#include <random>
#include <string>
#include <vector>

#include "fairsynth/evaluation.h"
#include "fairsynth/synthesis.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "testing/fixtures.h"
#include "testing/random_model.h"

namespace fairsynth {
namespace {

using ::fairsynth::testing::Items;
using ::testing::ElementsAre;

// 0 status_A, 1 status_B, 2 plan_none, 3 plan_bank, 4 plan_stores,
// 5 credit_amount, 6 sex.
FeatureMetadata CreditMetadata() {
  return FeatureMetadata(
      {{0, "status_A", FeatureKind::kOneHot, "status"},
       {1, "status_B", FeatureKind::kOneHot, "status"},
       {2, "plan_none", FeatureKind::kOneHot, "plan"},
       {3, "plan_bank", FeatureKind::kOneHot, "plan"},
       {4, "plan_stores", FeatureKind::kOneHot, "plan"},
       {5, "credit_amount", FeatureKind::kNumeric, std::nullopt},
       {6, "sex", FeatureKind::kBinary, std::nullopt}});
}

std::vector<std::string> Texts(const std::vector<RenderedFormula>& r) {
  std::vector<std::string> out;
  for (const RenderedFormula& f : r) out.push_back(f.text);
  return out;
}

TEST(RenderTest, MergesCategoricalValues) {
  const std::vector<Itemset> f = {
      Items({Item::Gt(0, 0.5), Item::Gt(2, 0.5)}),
      Items({Item::Gt(0, 0.5), Item::Gt(3, 0.5)})};
  const auto r = RenderFormulas(f, CreditMetadata());
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].text, "status = A ∧ (plan = none ∨ plan = bank)");
  EXPECT_THAT(r[0].sources, ElementsAre(0, 1));
}

TEST(RenderTest, NumericRange) {
  const std::vector<Itemset> f = {
      Items({Item::Gt(5, 250), Item::Le(5, 7464.5)})};
  EXPECT_THAT(Texts(RenderFormulas(f, CreditMetadata())),
              ElementsAre("250 < credit_amount ≤ 7464.5"));
}

TEST(RenderTest, OneSidedAndBinaryForms) {
  const std::vector<Itemset> f = {Items({Item::Le(5, 1000)}),
                                  Items({Item::Gt(5, 1000)}),
                                  Items({Item::Gt(6, 0.5)}),
                                  Items({Item::Le(6, 0.5), Item::Le(2, 0.5)})};
  EXPECT_THAT(Texts(RenderFormulas(f, CreditMetadata())),
              ElementsAre("credit_amount ≤ 1000", "credit_amount > 1000",
                          "sex = 1", "plan ≠ none ∧ sex = 0"));
}

TEST(RenderTest, EmptyItemsetIsTrue) {
  const std::vector<Itemset> f = {Itemset()};
  EXPECT_THAT(Texts(RenderFormulas(f, CreditMetadata())), ElementsAre("TRUE"));
}

TEST(RenderTest, NoMergeWhenOtherConjunctsDiffer) {
  const std::vector<Itemset> f = {
      Items({Item::Gt(0, 0.5), Item::Gt(2, 0.5)}),
      Items({Item::Gt(1, 0.5), Item::Gt(3, 0.5)})};
  EXPECT_THAT(Texts(RenderFormulas(f, CreditMetadata())),
              ElementsAre("status = A ∧ plan = none",
                          "status = B ∧ plan = bank"));
}

TEST(RenderTest, NumericNamesFromMetadata) {
  const std::vector<Itemset> f = {Items({Item::Le(0, 8), Item::Le(1, 6)})};
  EXPECT_THAT(Texts(RenderFormulas(f, ::fairsynth::testing::TwoNumericFeatures())),
              ElementsAre("x1 ≤ 8 ∧ x2 ≤ 6"));
}

// Rendering keeps the covered region on one-hot-consistent instances.
TEST(RenderPropertyTest, UnionPreserved) {
  std::mt19937_64 rng(1);
  ::fairsynth::testing::RandomModelParams p;
  p.max_features = 4;
  p.one_hot_columns = 4;
  int merged = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Ensemble e = ::fairsynth::testing::RandomEnsemble(rng, p);
    const std::vector<FeatureId> s = {0};
    auto f = Synthesize(e, s, {.max_iters = 4});
    ASSERT_TRUE(f.ok());
    const auto rendered = RenderFormulas(f->itemsets, e.metadata());
    merged += static_cast<int>(f->size() - rendered.size());
    std::vector<bool> used(f->size(), false);
    for (const RenderedFormula& r : rendered) {
      for (size_t src : r.sources) {
        ASSERT_FALSE(used[src]);
        used[src] = true;
      }
    }
    ASSERT_TRUE(std::all_of(used.begin(), used.end(), [](bool b) { return b; }));
    const InstanceSet data = GenRandomInstances(e.metadata(), 500, trial);
    auto check = [&](const Instance& x) {
      const bool any = std::any_of(
          rendered.begin(), rendered.end(),
          [&](const RenderedFormula& r) { return r.Matches(x); });
      ASSERT_EQ(any, f->Covers(x));
      // Each formula covers exactly its sources.
      for (const RenderedFormula& r : rendered) {
        bool src = false;
        for (size_t i : r.sources) src |= f->itemsets[i].region().Contains(x);
        ASSERT_EQ(r.Matches(x), src);
      }
    };
    for (const Instance& x : data.instances) check(x);
    for (const Instance& x : ::fairsynth::testing::ThresholdCellGrid(e)) {
      check(x);
    }
  }
  EXPECT_GT(merged, 0);
}

}  // namespace
}  // namespace fairsynth
