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

#include "fairsynth/geometry.h"

#include <charconv>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace fairsynth {

std::string Interval::ToString() const {
  return absl::StrCat("(", FormatNumber(lo_), ", ", FormatNumber(hi_), "]");
}

std::optional<Interval> Intersect(const Interval& a, const Interval& b) {
  return Interval::Make(std::max(a.lo(), b.lo()), std::min(a.hi(), b.hi()));
}

HyperRectangle HyperRectangle::FromDense(std::span<const Interval> dense) {
  HyperRectangle out;
  for (size_t f = 0; f < dense.size(); ++f) {
    if (!dense[f].is_full()) {
      out.entries_.emplace_back(static_cast<FeatureId>(f), dense[f]);
    }
  }
  return out;
}

Interval HyperRectangle::Get(FeatureId feature) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), feature,
      [](const Entry& e, FeatureId f) { return e.first < f; });
  if (it == entries_.end() || it->first != feature) return Interval::Full();
  return it->second;
}

bool HyperRectangle::Restrict(FeatureId feature, const Interval& bound) {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), feature,
      [](const Entry& e, FeatureId f) { return e.first < f; });
  if (it != entries_.end() && it->first == feature) {
    auto merged = Intersect(it->second, bound);
    if (!merged) return false;
    it->second = *merged;
    return true;
  }
  if (!bound.is_full()) entries_.insert(it, Entry(feature, bound));
  return true;
}

bool HyperRectangle::Intersects(const HyperRectangle& other) const {
  // Features constrained on one side only always intersect the full interval
  // of the other side, so only shared features matter.
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() && b != other.entries_.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      if (!a->second.Intersects(b->second)) return false;
      ++a;
      ++b;
    }
  }
  return true;
}

bool HyperRectangle::IsSubsetOf(const HyperRectangle& other) const {
  // Every feature constrained by `other` must be constrained at least as
  // tightly here.
  auto a = entries_.begin();
  for (const auto& [feature, bound] : other.entries_) {
    while (a != entries_.end() && a->first < feature) ++a;
    if (a == entries_.end() || a->first != feature) return false;
    if (!a->second.IsSubsetOf(bound)) return false;
  }
  return true;
}

bool HyperRectangle::Contains(std::span<const double> x) const {
  for (const auto& [feature, bound] : entries_) {
    if (static_cast<size_t>(feature) >= x.size()) return false;
    if (!bound.Contains(x[feature])) return false;
  }
  return true;
}

std::string HyperRectangle::ToString() const {
  std::string out = "<";
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (i > 0) absl::StrAppend(&out, ", ");
    absl::StrAppend(&out, "x", entries_[i].first, ":",
                    entries_[i].second.ToString());
  }
  absl::StrAppend(&out, ">");
  return out;
}

std::optional<HyperRectangle> Intersect(const HyperRectangle& a,
                                        const HyperRectangle& b) {
  HyperRectangle out = a;
  out.set_id(std::nullopt);
  for (const auto& [feature, bound] : b.entries()) {
    if (!out.Restrict(feature, bound)) return std::nullopt;
  }
  return out;
}

std::string FormatNumber(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "+inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace fairsynth
