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

// Interval and hyper-rectangle algebra over the feature space.
//
// Every interval is left-open and right-closed, (lo, hi], which matches the
// split semantics of tree nodes: a node on feature f with threshold v sends an
// instance left iff x_f <= v. Unbounded ends are IEEE infinities; an interval
// (v, +inf] therefore contains every finite x > v.

#ifndef FAIRSYNTH_GEOMETRY_H_
#define FAIRSYNTH_GEOMETRY_H_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fairsynth {

using FeatureId = int32_t;
using Instance = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class Interval {
 public:
  // The full real line.
  constexpr Interval() = default;

  // Returns the interval (lo, hi], or nullopt when it would be empty.
  static std::optional<Interval> Make(double lo, double hi) {
    if (!(lo < hi)) return std::nullopt;
    return Interval(lo, hi);
  }
  static constexpr Interval Full() { return Interval(); }
  // (-inf, v]
  static constexpr Interval AtMost(double v) { return Interval(-kInf, v); }
  // (v, +inf]
  static constexpr Interval GreaterThan(double v) { return Interval(v, kInf); }

  constexpr double lo() const { return lo_; }
  constexpr double hi() const { return hi_; }

  constexpr bool is_full() const { return lo_ == -kInf && hi_ == kInf; }
  constexpr bool Contains(double x) const { return lo_ < x && x <= hi_; }
  constexpr bool IsSubsetOf(const Interval& other) const {
    return other.lo_ <= lo_ && hi_ <= other.hi_;
  }
  constexpr bool Intersects(const Interval& other) const {
    return std::max(lo_, other.lo_) < std::min(hi_, other.hi_);
  }

  friend constexpr bool operator==(const Interval&, const Interval&) = default;

  std::string ToString() const;

 private:
  constexpr Interval(double lo, double hi) : lo_(lo), hi_(hi) {}

  double lo_ = -kInf;
  double hi_ = kInf;
};

std::optional<Interval> Intersect(const Interval& a, const Interval& b);

// A box in the feature space. Only constrained features are stored, sorted by
// feature id; a feature that is absent ranges over the whole real line. Since
// every stored interval is non-empty, a HyperRectangle is never empty.
class HyperRectangle {
 public:
  using Entry = std::pair<FeatureId, Interval>;

  HyperRectangle() = default;

  // Builds a rectangle from a dense per-feature vector, dropping full
  // intervals.
  static HyperRectangle FromDense(std::span<const Interval> dense);

  std::optional<int64_t> id() const { return id_; }
  void set_id(std::optional<int64_t> id) { id_ = id; }

  // Constrained features only, ascending by feature id.
  std::span<const Entry> entries() const { return entries_; }
  size_t num_constrained() const { return entries_.size(); }
  bool is_full() const { return entries_.empty(); }

  Interval Get(FeatureId feature) const;

  // Intersects the interval on `feature` with `bound`. Returns false, leaving
  // the rectangle untouched, when the result would be empty.
  bool Restrict(FeatureId feature, const Interval& bound);

  bool Intersects(const HyperRectangle& other) const;
  bool IsSubsetOf(const HyperRectangle& other) const;
  bool Contains(std::span<const double> x) const;

  // Same intervals; ids are not compared.
  bool SameRegion(const HyperRectangle& other) const {
    return entries_ == other.entries_;
  }

  std::string ToString() const;

 private:
  std::optional<int64_t> id_;
  std::vector<Entry> entries_;
};

std::optional<HyperRectangle> Intersect(const HyperRectangle& a,
                                        const HyperRectangle& b);

// Shortest decimal text that round-trips to the same double; infinities are
// rendered as "-inf" / "+inf".
std::string FormatNumber(double v);

}  // namespace fairsynth

#endif  // FAIRSYNTH_GEOMETRY_H_
