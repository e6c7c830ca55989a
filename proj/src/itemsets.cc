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

#include "fairsynth/itemsets.h"

#include <algorithm>
#include <set>

#include "absl/strings/str_cat.h"

namespace fairsynth {

std::string Item::ToString() const {
  return absl::StrCat("x", feature, op == ItemOp::kLe ? " <= " : " > ",
                      FormatNumber(threshold));
}

std::strong_ordering CompareItems(const Item& a, const Item& b) {
  if (auto c = a.feature <=> b.feature; c != 0) return c;
  if (a.op != b.op) {
    return a.op == ItemOp::kLe ? std::strong_ordering::less
                               : std::strong_ordering::greater;
  }
  if (a.threshold == b.threshold) return std::strong_ordering::equal;
  const bool a_first = a.op == ItemOp::kLe ? a.threshold > b.threshold
                                           : a.threshold < b.threshold;
  return a_first ? std::strong_ordering::less : std::strong_ordering::greater;
}

std::strong_ordering CompareItemsets(const Itemset& a, const Itemset& b) {
  const auto ai = a.items();
  const auto bi = b.items();
  const size_t n = std::min(ai.size(), bi.size());
  for (size_t i = 0; i < n; ++i) {
    if (auto c = CompareItems(ai[i], bi[i]); c != 0) return c;
  }
  return ai.size() <=> bi.size();
}

std::optional<Itemset> Itemset::FromItems(std::vector<Item> items) {
  std::sort(items.begin(), items.end(), ItemLess());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  Itemset out;
  for (const Item& item : items) {
    if (!out.region_.Restrict(item.feature, item.interval())) {
      return std::nullopt;
    }
  }
  out.items_ = std::move(items);
  return out;
}

std::string Itemset::ToString() const {
  if (items_.empty()) return "{}";
  std::string out = "{";
  for (size_t i = 0; i < items_.size(); ++i) {
    absl::StrAppend(&out, i > 0 ? ", " : "", items_[i].ToString());
  }
  absl::StrAppend(&out, "}");
  return out;
}

bool AssertsOneHot(const Item& item, const FeatureMetadata& metadata) {
  return item.op == ItemOp::kGt && metadata.IsOneHot(item.feature) &&
         item.threshold >= 0.0 && item.threshold < 1.0;
}

bool HasOneHotIntegrity(std::span<const Item> items,
                        const FeatureMetadata& metadata) {
  std::vector<std::string_view> active;
  for (const Item& item : items) {
    if (!AssertsOneHot(item, metadata)) continue;
    const std::string& group = *metadata[item.feature].group;
    if (std::find(active.begin(), active.end(), group) != active.end()) {
      return false;
    }
    active.push_back(group);
  }
  return true;
}

std::vector<Itemset> GenItemsets(const UnstableSet& unstable,
                                 const FeatureMetadata& metadata) {
  std::set<Item, ItemLess> items;
  for (const HyperRectangle& h : unstable.rectangles) {
    for (const auto& [feature, bound] : h.entries()) {
      if (bound.lo() != -kInf) items.insert(Item::Le(feature, bound.lo()));
      if (bound.hi() != kInf) items.insert(Item::Gt(feature, bound.hi()));
    }
  }
  std::vector<Itemset> out;
  out.reserve(items.size());
  for (const Item& item : items) {
    const Item single[] = {item};
    if (!HasOneHotIntegrity(single, metadata)) continue;
    Itemset itemset = *Itemset::FromItems({item});
    std::vector<uint32_t> unresolved;
    for (size_t id = 0; id < unstable.size(); ++id) {
      if (itemset.region().Intersects(unstable.rectangles[id])) {
        unresolved.push_back(static_cast<uint32_t>(id));
      }
    }
    itemset.set_unresolved_ids(std::move(unresolved));
    out.push_back(std::move(itemset));
  }
  return out;
}

std::optional<Itemset> Meet(const Itemset& first, const Itemset& second,
                            const FeatureMetadata& metadata) {
  const auto a = first.items();
  const auto b = second.items();
  if (a.size() != b.size() || a.empty()) return std::nullopt;

  // The unique item of `second` missing from `first`.
  std::optional<Item> extra;
  size_t i = 0;
  size_t j = 0;
  size_t missing = 0;
  while (j < b.size()) {
    const auto c = i < a.size() ? CompareItems(a[i], b[j])
                                : std::strong_ordering::greater;
    if (c == 0) {
      ++i;
      ++j;
    } else if (c < 0) {
      ++i;
    } else {
      extra = b[j];
      ++missing;
      ++j;
    }
  }
  if (missing != 1) return std::nullopt;

  Itemset out;
  out.region_ = first.region_;
  out.region_.set_id(std::nullopt);
  if (!out.region_.Restrict(extra->feature, extra->interval())) {
    return std::nullopt;
  }
  if (out.region_.SameRegion(first.region_) ||
      out.region_.SameRegion(second.region_)) {
    return std::nullopt;
  }
  if (AssertsOneHot(*extra, metadata)) {
    const std::string& group = *metadata[extra->feature].group;
    for (const Item& item : a) {
      if (AssertsOneHot(item, metadata) &&
          *metadata[item.feature].group == group) {
        return std::nullopt;
      }
    }
  }

  out.items_.reserve(a.size() + 1);
  auto pos = std::lower_bound(a.begin(), a.end(), *extra, ItemLess());
  out.items_.insert(out.items_.end(), a.begin(), pos);
  out.items_.push_back(*extra);
  out.items_.insert(out.items_.end(), pos, a.end());

  if (first.unresolved_ && second.unresolved_) {
    out.unresolved_.emplace();
    std::set_intersection(first.unresolved_->begin(), first.unresolved_->end(),
                          second.unresolved_->begin(),
                          second.unresolved_->end(),
                          std::back_inserter(*out.unresolved_));
  } else {
    out.unresolved_ = first.unresolved_ ? first.unresolved_ : second.unresolved_;
  }
  return out;
}

bool SubsumedByAny(const Itemset& candidate, std::span<const Itemset> fair) {
  return std::any_of(fair.begin(), fair.end(), [&](const Itemset& f) {
    return candidate.region().IsSubsetOf(f.region());
  });
}

FairCheck CheckFair(const Itemset& itemset, const UnstableSet& unstable,
                    bool use_id_cache) {
  FairCheck out;
  out.itemset = itemset;
  std::vector<uint32_t> still;
  auto test = [&](uint32_t id) {
    ++out.rectangles_tested;
    if (itemset.region().Intersects(unstable.rectangles[id])) {
      still.push_back(id);
    }
  };
  if (use_id_cache && itemset.has_id_cache()) {
    for (uint32_t id : itemset.unresolved_ids()) test(id);
  } else {
    for (size_t id = 0; id < unstable.size(); ++id) {
      test(static_cast<uint32_t>(id));
    }
  }
  out.fair = still.empty();
  out.itemset.set_unresolved_ids(std::move(still));
  return out;
}

}  // namespace fairsynth
