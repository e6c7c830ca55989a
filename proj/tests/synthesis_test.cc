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

#include <random>
#include <string>
#include <vector>

#include "fairsynth/evaluation.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "testing/fixtures.h"
#include "testing/random_model.h"

namespace fairsynth {
namespace {

using ::fairsynth::testing::Box;
using ::fairsynth::testing::ExampleEnsemble;
using ::fairsynth::testing::Iv;
using ::fairsynth::testing::RandomEnsemble;
using ::fairsynth::testing::RandomModelParams;
using ::fairsynth::testing::ThresholdCellGrid;
using ::fairsynth::testing::TwoNumericFeatures;
using ::fairsynth::testing::TwoRectangleUnstableSet;
using ::testing::ElementsAre;
using ::testing::IsEmpty;

std::vector<std::string> Strings(std::span<const Itemset> itemsets) {
  std::vector<std::string> out;
  for (const Itemset& i : itemsets) out.push_back(i.ToString());
  return out;
}

TEST(SynthesizeFromTest, TwoRectangleWalkthrough) {
  const FormulaSet f = SynthesizeFrom(TwoRectangleUnstableSet(),
                                      TwoNumericFeatures(), {.max_iters = 2});
  EXPECT_THAT(Strings(f.itemsets),
              ElementsAre("{x0 <= 1}", "{x0 > 7}", "{x1 <= 2}", "{x1 > 8}",
                          "{x0 <= 4, x1 <= 3}", "{x0 > 5, x1 > 6}"));
  EXPECT_THAT(f.found_at, ElementsAre(1, 1, 1, 1, 2, 2));
  EXPECT_THAT(Strings(f.candidates),
              ElementsAre("{x0 <= 4, x1 > 6}", "{x0 > 5, x1 <= 3}"));
  EXPECT_EQ(f.iterations, 2);
  EXPECT_FALSE(f.converged);
  ASSERT_EQ(f.per_iteration.size(), 2u);
  EXPECT_EQ(f.per_iteration[0].added, 4u);
  EXPECT_EQ(f.per_iteration[0].candidates, 4u);
  EXPECT_EQ(f.per_iteration[1].meets, 4u);
  EXPECT_EQ(f.per_iteration[1].added, 2u);
  EXPECT_EQ(f.per_iteration[1].candidates, 2u);
}

TEST(SynthesizeFromTest, TwoRectangleConverges) {
  const FormulaSet f =
      SynthesizeFrom(TwoRectangleUnstableSet(), TwoNumericFeatures());
  EXPECT_TRUE(f.converged);
  EXPECT_EQ(f.iterations, 3);
  EXPECT_EQ(f.size(), 6u);
  EXPECT_THAT(f.candidates, IsEmpty());
  // Every point off both rectangles is covered, every point on them is not.
  const UnstableSet u = TwoRectangleUnstableSet();
  for (int a = -2; a <= 20; ++a) {
    for (int b = -2; b <= 20; ++b) {
      const std::vector<double> x = {a / 2.0, b / 2.0};
      EXPECT_NE(f.Covers(x), u.Contains(x)) << a / 2.0 << "," << b / 2.0;
    }
  }
}

TEST(SynthesizeFromTest, SingletonPassOnly) {
  const FormulaSet f = SynthesizeFrom(TwoRectangleUnstableSet(),
                                      TwoNumericFeatures(), {.max_iters = 1});
  EXPECT_EQ(f.size(), 4u);
  EXPECT_EQ(f.candidates.size(), 4u);
  EXPECT_FALSE(f.converged);
}

TEST(SynthesizeFromTest, EmptyUnstableSetGivesTrue) {
  const FormulaSet f = SynthesizeFrom(UnstableSet{}, TwoNumericFeatures());
  ASSERT_EQ(f.size(), 1u);
  EXPECT_TRUE(f.itemsets[0].empty());
  EXPECT_THAT(f.found_at, ElementsAre(0));
  EXPECT_EQ(f.iterations, 0);
  EXPECT_TRUE(f.converged);
  EXPECT_TRUE(f.Covers(std::vector<double>{1e9, -1e9}));
}

TEST(SynthesizeFromTest, CandidateLimitKeepsCompletedIterations) {
  const FormulaSet f =
      SynthesizeFrom(TwoRectangleUnstableSet(), TwoNumericFeatures(),
                     {.max_candidates = 1});
  EXPECT_TRUE(f.resource_limit_hit);
  EXPECT_FALSE(f.converged);
  EXPECT_EQ(f.iterations, 1);
  EXPECT_EQ(f.size(), 4u);
  EXPECT_THAT(f.warning, ::testing::HasSubstr("candidate limit"));
}

TEST(SynthesizeFromTest, UpToSelectsByIteration) {
  const FormulaSet f =
      SynthesizeFrom(TwoRectangleUnstableSet(), TwoNumericFeatures());
  EXPECT_EQ(f.UpTo(0).size(), 0u);
  EXPECT_EQ(f.UpTo(1).size(), 4u);
  EXPECT_EQ(f.UpTo(2).size(), 6u);
  EXPECT_EQ(f.UpTo(7).size(), 6u);
}

TEST(SynthesizeTest, ExampleTreeSensitiveX1) {
  const std::vector<FeatureId> s = {0};
  auto f = Synthesize(ExampleEnsemble(), s);
  ASSERT_TRUE(f.ok());
  EXPECT_TRUE(f->converged);
  EXPECT_THAT(Strings(f->itemsets),
              ElementsAre("{x0 <= 8, x1 <= 6}", "{x0 > 8, x1 > 7}"));
}

TEST(SynthesizeTest, ConstantClassifier) {
  const std::vector<FeatureId> s = {0, 1};
  auto f = Synthesize(::fairsynth::testing::ConstantEnsemble(), s);
  ASSERT_TRUE(f.ok());
  ASSERT_EQ(f->size(), 1u);
  EXPECT_TRUE(f->itemsets[0].empty());
}

TEST(SynthesizeTest, PropagatesAnalysisError) {
  const std::vector<FeatureId> s = {0};
  auto f = Synthesize(ExampleEnsemble(), s, {}, {.max_classes = 1});
  EXPECT_EQ(f.status().code(), absl::StatusCode::kResourceExhausted);
}

void ExpectSameFormulas(const FormulaSet& a, const FormulaSet& b) {
  ASSERT_EQ(Strings(a.itemsets), Strings(b.itemsets));
  ASSERT_EQ(a.found_at, b.found_at);
  ASSERT_EQ(Strings(a.candidates), Strings(b.candidates));
  ASSERT_EQ(a.iterations, b.iterations);
  ASSERT_EQ(a.converged, b.converged);
}

// Random rectangles on a small grid over three numeric features.
UnstableSet RandomUnstableSet(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 5);
  std::uniform_int_distribution<int> pt(0, 6);
  std::bernoulli_distribution unbounded(0.2);
  std::vector<HyperRectangle> rects;
  for (int n = count(rng); n > 0; --n) {
    HyperRectangle h;
    for (FeatureId f = 0; f < 3; ++f) {
      int a = pt(rng);
      int b = pt(rng);
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      h.Restrict(f, *Interval::Make(unbounded(rng) ? -kInf : a,
                                    unbounded(rng) ? kInf : b));
    }
    rects.push_back(h);
  }
  return MakeUnstableSet(std::move(rects));
}

FeatureMetadata ThreeNumeric() {
  return FeatureMetadata({{0, "a", FeatureKind::kNumeric, std::nullopt},
                          {1, "b", FeatureKind::kNumeric, std::nullopt},
                          {2, "c", FeatureKind::kNumeric, std::nullopt}});
}

// With the search run to the end, the conditions cover exactly the
// complement of U.
TEST(SynthesisPropertyTest, ConvergedUnionIsComplementOfU) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 150; ++trial) {
    const UnstableSet u = RandomUnstableSet(rng);
    const FormulaSet f = SynthesizeFrom(u, ThreeNumeric());
    ASSERT_TRUE(f.converged);
    for (const Itemset& i : f.itemsets) {
      for (const HyperRectangle& h : u.rectangles) {
        ASSERT_FALSE(i.region().Intersects(h));
      }
    }
    for (int a = -1; a <= 13; ++a) {
      for (int b = -1; b <= 13; ++b) {
        for (int c = -1; c <= 13; ++c) {
          const std::vector<double> x = {a / 2.0, b / 2.0, c / 2.0};
          ASSERT_NE(f.Covers(x), u.Contains(x));
        }
      }
    }
  }
}

// Stopping after k iterations yields exactly the first k iterations of a
// longer run, and coverage only grows.
TEST(SynthesisPropertyTest, AnytimePrefix) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const UnstableSet u = RandomUnstableSet(rng);
    const FormulaSet full = SynthesizeFrom(u, ThreeNumeric());
    for (int k = 1; k <= full.iterations; ++k) {
      const FormulaSet cut = SynthesizeFrom(u, ThreeNumeric(), {.max_iters = k});
      ASSERT_EQ(Strings(cut.itemsets), Strings(full.UpTo(k)));
      ASSERT_EQ(cut.converged, k == full.iterations);
    }
  }
}

TEST(SynthesisPropertyTest, NoConditionContainedInAnotherEarlierOne) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const FormulaSet f = SynthesizeFrom(RandomUnstableSet(rng), ThreeNumeric());
    for (size_t i = 0; i < f.size(); ++i) {
      for (size_t j = 0; j < i; ++j) {
        ASSERT_FALSE(f.itemsets[i].region().IsSubsetOf(f.itemsets[j].region()))
            << f.itemsets[i].ToString() << " in " << f.itemsets[j].ToString();
      }
    }
  }
}

TEST(SynthesisPropertyTest, ThreadCountAndIdCacheDoNotChangeResult) {
  std::mt19937_64 rng(4);
  RandomModelParams p;
  p.one_hot_columns = 3;
  for (int trial = 0; trial < 30; ++trial) {
    const Ensemble e = RandomEnsemble(rng, p);
    const std::vector<FeatureId> s = {0};
    auto base = Synthesize(e, s);
    ASSERT_TRUE(base.ok());
    for (int threads : {2, 8}) {
      auto other = Synthesize(e, s, {.threads = threads});
      ASSERT_TRUE(other.ok());
      ExpectSameFormulas(*base, *other);
    }
    auto uncached = Synthesize(e, s, {.use_id_cache = false});
    ASSERT_TRUE(uncached.ok());
    ExpectSameFormulas(*base, *uncached);
  }
}

// Soundness and completeness against the oracle on the threshold grid.
TEST(SynthesisPropertyTest, SoundAndCompleteOnRandomEnsembles) {
  std::mt19937_64 rng(5);
  RandomModelParams p;
  p.max_features = 4;
  p.one_hot_columns = 3;
  for (int trial = 0; trial < 40; ++trial) {
    const Ensemble e = RandomEnsemble(rng, p);
    for (const std::vector<FeatureId>& s :
         {std::vector<FeatureId>{0}, e.metadata().GroupMembers("color")}) {
      auto u = Analyze(e, s);
      ASSERT_TRUE(u.ok());
      const FormulaSet f = SynthesizeFrom(*u, e.metadata());
      ASSERT_TRUE(f.converged);
      const DiscriminationOracle oracle(e, s);
      for (const Instance& x : ThresholdCellGrid(e)) {
        const bool covered = f.Covers(x);
        if (covered) ASSERT_FALSE(oracle.IsDiscriminated(x));
        ASSERT_NE(covered, u->Contains(x));
      }
    }
  }
}

}  // namespace
}  // namespace fairsynth
