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

// Items, itemsets and the meet operator used to build fairness conditions.

#ifndef FAIRSYNTH_ITEMSETS_H_
#define FAIRSYNTH_ITEMSETS_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairsynth/geometry.h"
#include "fairsynth/model.h"
#include "fairsynth/stability.h"

namespace fairsynth {

enum class ItemOp : uint8_t { kLe, kGt };

// An atomic predicate x_feature <= threshold or x_feature > threshold.
struct Item {
  FeatureId feature = 0;
  ItemOp op = ItemOp::kLe;
  double threshold = 0.0;

  static Item Le(FeatureId f, double v) { return {f, ItemOp::kLe, v}; }
  static Item Gt(FeatureId f, double v) { return {f, ItemOp::kGt, v}; }

  Interval interval() const {
    return op == ItemOp::kLe ? Interval::AtMost(threshold)
                             : Interval::GreaterThan(threshold);
  }

  std::string ToString() const;

  friend bool operator==(const Item&, const Item&) = default;
};

// Canonical item order: feature ascending, then <= before >, then <= items by
// decreasing threshold and > items by increasing threshold. With this order a
// tighter bound always follows a looser one on the same feature.
std::strong_ordering CompareItems(const Item& a, const Item& b);

struct ItemLess {
  bool operator()(const Item& a, const Item& b) const {
    return CompareItems(a, b) < 0;
  }
};

// A conjunction of items, kept in canonical order, together with its
// interpretation and the bookkeeping for fairness checks.
class Itemset {
 public:
  // The empty conjunction, i.e. TRUE.
  Itemset() = default;

  // Sorts the items; returns nullopt if their conjunction is empty.
  static std::optional<Itemset> FromItems(std::vector<Item> items);

  std::span<const Item> items() const { return items_; }
  size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const HyperRectangle& region() const { return region_; }

  // Ids of the rectangles of U not yet shown to be disjoint from region().
  // This is the complement of the "disjoint ids" set: an itemset is fair
  // exactly when no id is left unresolved. Sorted ascending. Itemsets built
  // directly from items carry no cache until their first CheckFair().
  bool has_id_cache() const { return unresolved_.has_value(); }
  std::span<const uint32_t> unresolved_ids() const {
    return unresolved_ ? std::span<const uint32_t>(*unresolved_)
                       : std::span<const uint32_t>();
  }
  void set_unresolved_ids(std::vector<uint32_t> ids) {
    unresolved_ = std::move(ids);
  }
  // Number of rectangles, out of `u_size`, known to be disjoint.
  size_t disjoint_count(size_t u_size) const {
    return unresolved_ ? u_size - unresolved_->size() : 0;
  }

  std::string ToString() const;

  // Same items, in order. Bookkeeping is ignored.
  friend bool operator==(const Itemset& a, const Itemset& b) {
    return a.items_ == b.items_;
  }

 private:
  friend std::optional<Itemset> Meet(const Itemset&, const Itemset&,
                                     const FeatureMetadata&);

  std::vector<Item> items_;
  HyperRectangle region_;
  std::optional<std::vector<uint32_t>> unresolved_;
};

// Lexicographic order over canonical item sequences; a proper prefix sorts
// first.
std::strong_ordering CompareItemsets(const Itemset& a, const Itemset& b);

struct ItemsetLess {
  bool operator()(const Itemset& a, const Itemset& b) const {
    return CompareItemsets(a, b) < 0;
  }
};

// True iff `item` states that a one-hot column is active (x_f > v with
// 0 <= v < 1).
bool AssertsOneHot(const Item& item, const FeatureMetadata& metadata);

// True iff no two items assert active columns of the same one-hot group.
bool HasOneHotIntegrity(std::span<const Item> items,
                        const FeatureMetadata& metadata);

// Singleton itemsets describing the outside of each rectangle: for every
// finite face (l, u] of a rectangle, {x_f <= l} and {x_f > u}. Identical
// singletons are emitted once; the result is sorted canonically and each
// itemset's unresolved ids are exactly the rectangles it intersects.
std::vector<Itemset> GenItemsets(const UnstableSet& unstable,
                                 const FeatureMetadata& metadata);

// Meet of two k-itemsets sharing k-1 items: I1 plus the one item of I2 that
// I1 lacks. Nullopt unless the result is non-empty, strictly smaller than
// both operands and keeps one-hot integrity. The result's unresolved ids are
// the intersection of the operands' (the union of their disjoint ids).
std::optional<Itemset> Meet(const Itemset& first, const Itemset& second,
                            const FeatureMetadata& metadata);

// Whether some fair itemset's region contains `candidate`'s region.
bool SubsumedByAny(const Itemset& candidate, std::span<const Itemset> fair);

struct FairCheck {
  bool fair = false;
  Itemset itemset;  // With updated unresolved ids.
  size_t rectangles_tested = 0;
};

// Tests `itemset` against the rectangles still listed as unresolved and drops
// the ones found disjoint. With `use_id_cache` false every rectangle of U is
// tested from scratch instead.
FairCheck CheckFair(const Itemset& itemset, const UnstableSet& unstable,
                    bool use_id_cache = true);

}  // namespace fairsynth

#endif  // FAIRSYNTH_ITEMSETS_H_
