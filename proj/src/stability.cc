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

#include "fairsynth/stability.h"

#include <algorithm>
#include <unordered_map>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace fairsynth {
namespace {

// Dense working bounds (lo, hi]; cheaper to mutate than HyperRectangle.
struct Bounds {
  double lo = -kInf;
  double hi = kInf;

  bool Overlaps(const Bounds& o) const {
    return std::max(lo, o.lo) < std::min(hi, o.hi);
  }
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

HyperRectangle ToRectangle(std::span<const Bounds> dense) {
  std::vector<Interval> intervals;
  intervals.reserve(dense.size());
  for (const Bounds& b : dense) intervals.push_back(*Interval::Make(b.lo, b.hi));
  return HyperRectangle::FromDense(intervals);
}

struct LeafTupleHash {
  size_t operator()(const std::vector<int32_t>& v) const {
    size_t h = 1469598103934665603ull;
    for (int32_t x : v) {
      h ^= static_cast<size_t>(static_cast<uint32_t>(x));
      h *= 1099511628211ull;
    }
    return h;
  }
};

// Walks the product of root-to-leaf paths, one tree after another.
class ClassEnumerator {
 public:
  ClassEnumerator(const Ensemble& ensemble, size_t max_classes)
      : ensemble_(ensemble),
        max_classes_(max_classes),
        region_(ensemble.num_features()),
        votes_(ensemble.num_labels(), 0) {}

  absl::Status Run() {
    EnterTree(0);
    if (exceeded_) {
      return absl::ResourceExhaustedError(absl::StrCat(
          "more than ", max_classes_,
          " equivalence classes; the model is too large for exact analysis "
          "(raise --max-classes to continue)"));
    }
    return absl::OkStatus();
  }

  std::vector<EquivalenceClass>& classes() { return classes_; }
  std::vector<std::vector<int32_t>>& leaf_tuples() { return leaf_tuples_; }

 private:
  void EnterTree(size_t t) {
    if (exceeded_) return;
    if (t == ensemble_.trees().size()) {
      if (classes_.size() == max_classes_) {
        exceeded_ = true;
        return;
      }
      classes_.push_back({ToRectangle(region_), MajorityLabel(votes_)});
      leaf_tuples_.push_back(leaves_);
      return;
    }
    Walk(t, 0);
  }

  void Walk(size_t t, int32_t index) {
    const Tree::Node& n = ensemble_.trees()[t].node(index);
    if (n.is_leaf()) {
      ++votes_[n.label];
      leaves_.push_back(index);
      EnterTree(t + 1);
      leaves_.pop_back();
      --votes_[n.label];
      return;
    }
    const Bounds saved = region_[n.feature];
    if (saved.lo < n.threshold) {
      region_[n.feature].hi = std::min(saved.hi, n.threshold);
      Walk(t, n.left);
      region_[n.feature] = saved;
    }
    if (saved.hi > n.threshold) {
      region_[n.feature].lo = std::max(saved.lo, n.threshold);
      Walk(t, n.right);
      region_[n.feature] = saved;
    }
  }

  const Ensemble& ensemble_;
  const size_t max_classes_;
  std::vector<Bounds> region_;
  std::vector<int32_t> votes_;
  std::vector<int32_t> leaves_;
  std::vector<EquivalenceClass> classes_;
  std::vector<std::vector<int32_t>> leaf_tuples_;
  bool exceeded_ = false;
};

// Whether the majority over `votes` is settled no matter how `remaining`
// further votes fall; sets *label to it.
bool MajorityDecided(std::span<const int32_t> votes, size_t remaining,
                     LabelId* label) {
  const LabelId leader = MajorityLabel(votes);
  const auto r = static_cast<int64_t>(remaining);
  for (size_t l = 0; l < votes.size(); ++l) {
    if (static_cast<LabelId>(l) == leader) continue;
    const int64_t challenger = votes[l] + r;
    if (challenger > votes[leader]) return false;
    if (challenger == votes[leader] && static_cast<LabelId>(l) < leader) {
      return false;
    }
  }
  *label = leader;
  return true;
}

// Walks pairs of leaf combinations (a, b) with a < b in leaf-tuple order whose
// boxes overlap on every non-sensitive feature, and collects both members of
// every pair that is classified differently and differs on a sensitive
// feature.
class PairEnumerator {
 public:
  using Found = std::unordered_map<std::vector<int32_t>, HyperRectangle,
                                   LeafTupleHash>;

  PairEnumerator(const Ensemble& ensemble, std::span<const FeatureId> sensitive,
                 size_t max_classes)
      : ensemble_(ensemble),
        max_classes_(max_classes),
        is_sensitive_(ensemble.num_features(), false),
        sensitive_(sensitive.begin(), sensitive.end()),
        a_(ensemble.num_features()),
        b_(ensemble.num_features()),
        votes_a_(ensemble.num_labels(), 0),
        votes_b_(ensemble.num_labels(), 0) {
    for (FeatureId f : sensitive) is_sensitive_[f] = true;
  }

  absl::Status Run() {
    EnterTree(0, false);
    if (exceeded_) {
      return absl::ResourceExhaustedError(absl::StrCat(
          "more than ", max_classes_,
          " unstable equivalence classes; the model is too large for exact "
          "analysis (raise --max-classes to continue)"));
    }
    return absl::OkStatus();
  }

  Found& found() { return found_; }

 private:
  void EnterTree(size_t t, bool diverged) {
    if (exceeded_) return;
    const size_t remaining = ensemble_.trees().size() - t;
    if (remaining == 0) {
      if (diverged) Finish();
      return;
    }
    // Both majorities settled on the same label: no pair below differs.
    LabelId la = 0;
    LabelId lb = 0;
    if (MajorityDecided(votes_a_, remaining, &la) &&
        MajorityDecided(votes_b_, remaining, &lb) && la == lb) {
      return;
    }
    WalkA(t, 0, diverged);
  }

  void WalkA(size_t t, int32_t index, bool diverged) {
    const Tree::Node& n = ensemble_.trees()[t].node(index);
    if (n.is_leaf()) {
      ++votes_a_[n.label];
      leaves_a_.push_back(index);
      WalkB(t, 0, index, diverged);
      leaves_a_.pop_back();
      --votes_a_[n.label];
      return;
    }
    const FeatureId f = n.feature;
    const Bounds saved = a_[f];
    if (saved.lo < n.threshold) {
      a_[f].hi = std::min(saved.hi, n.threshold);
      if (is_sensitive_[f] || a_[f].Overlaps(b_[f])) WalkA(t, n.left, diverged);
      a_[f] = saved;
    }
    if (saved.hi > n.threshold) {
      a_[f].lo = std::max(saved.lo, n.threshold);
      if (is_sensitive_[f] || a_[f].Overlaps(b_[f])) {
        WalkA(t, n.right, diverged);
      }
      a_[f] = saved;
    }
  }

  void WalkB(size_t t, int32_t index, int32_t leaf_a, bool diverged) {
    const Tree::Node& n = ensemble_.trees()[t].node(index);
    if (n.is_leaf()) {
      // Visiting only b >= a at the first tree where the combinations differ
      // yields each unordered pair once.
      if (!diverged && index < leaf_a) return;
      ++votes_b_[n.label];
      leaves_b_.push_back(index);
      EnterTree(t + 1, diverged || index > leaf_a);
      leaves_b_.pop_back();
      --votes_b_[n.label];
      return;
    }
    const FeatureId f = n.feature;
    const Bounds saved = b_[f];
    if (saved.lo < n.threshold) {
      b_[f].hi = std::min(saved.hi, n.threshold);
      if (is_sensitive_[f] || b_[f].Overlaps(a_[f])) {
        WalkB(t, n.left, leaf_a, diverged);
      }
      b_[f] = saved;
    }
    if (saved.hi > n.threshold) {
      b_[f].lo = std::max(saved.lo, n.threshold);
      if (is_sensitive_[f] || b_[f].Overlaps(a_[f])) {
        WalkB(t, n.right, leaf_a, diverged);
      }
      b_[f] = saved;
    }
  }

  void Finish() {
    if (MajorityLabel(votes_a_) == MajorityLabel(votes_b_)) return;
    const bool differs = std::any_of(
        sensitive_.begin(), sensitive_.end(),
        [&](FeatureId f) { return !(a_[f] == b_[f]); });
    if (!differs) return;
    Record(leaves_a_, a_);
    Record(leaves_b_, b_);
  }

  void Record(const std::vector<int32_t>& leaves,
              std::span<const Bounds> region) {
    if (found_.contains(leaves)) return;
    if (found_.size() == max_classes_) {
      exceeded_ = true;
      return;
    }
    found_.emplace(leaves, ToRectangle(region));
  }

  const Ensemble& ensemble_;
  const size_t max_classes_;
  std::vector<bool> is_sensitive_;
  std::vector<FeatureId> sensitive_;
  std::vector<Bounds> a_;
  std::vector<Bounds> b_;
  std::vector<int32_t> votes_a_;
  std::vector<int32_t> votes_b_;
  std::vector<int32_t> leaves_a_;
  std::vector<int32_t> leaves_b_;
  Found found_;
  bool exceeded_ = false;
};

// Position of each leaf in a left-first traversal of its tree; the order in
// which ClassEnumerator visits them.
std::vector<int32_t> LeafRanks(const Tree& tree) {
  std::vector<int32_t> rank(tree.nodes().size(), -1);
  int32_t next = 0;
  std::vector<int32_t> stack = {0};
  while (!stack.empty()) {
    const int32_t i = stack.back();
    stack.pop_back();
    const Tree::Node& n = tree.node(i);
    if (n.is_leaf()) {
      rank[i] = next++;
    } else {
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
  return rank;
}

absl::Status ValidateSensitive(std::span<const FeatureId> sensitive,
                               size_t num_features) {
  for (FeatureId f : sensitive) {
    if (f < 0 || static_cast<size_t>(f) >= num_features) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown feature ", f, " in the sensitive set"));
    }
  }
  return absl::OkStatus();
}

}  // namespace

bool UnstableSet::Contains(std::span<const double> x) const {
  return std::any_of(rectangles.begin(), rectangles.end(),
                     [&](const HyperRectangle& h) { return h.Contains(x); });
}

UnstableSet MakeUnstableSet(std::vector<HyperRectangle> rectangles) {
  UnstableSet out;
  for (HyperRectangle& h : rectangles) {
    const bool duplicate = std::any_of(
        out.rectangles.begin(), out.rectangles.end(),
        [&](const HyperRectangle& seen) { return seen.SameRegion(h); });
    if (duplicate) continue;
    h.set_id(static_cast<int64_t>(out.rectangles.size()));
    out.rectangles.push_back(std::move(h));
  }
  return out;
}

absl::StatusOr<std::vector<EquivalenceClass>> EnumerateEquivalenceClasses(
    const Ensemble& ensemble, size_t max_classes) {
  ClassEnumerator enumerator(ensemble, max_classes);
  if (auto s = enumerator.Run(); !s.ok()) return s;
  return std::move(enumerator.classes());
}

absl::StatusOr<UnstableSet> Analyze(const Ensemble& ensemble,
                                    std::span<const FeatureId> sensitive,
                                    const AnalysisOptions& options) {
  if (auto s = ValidateSensitive(sensitive, ensemble.num_features());
      !s.ok()) {
    return s;
  }
  PairEnumerator pairs(ensemble, sensitive, options.max_classes);
  if (auto s = pairs.Run(); !s.ok()) return s;

  // Report classes in enumeration order.
  std::vector<std::vector<int32_t>> ranks;
  for (const Tree& tree : ensemble.trees()) ranks.push_back(LeafRanks(tree));
  std::vector<std::pair<std::vector<int32_t>, HyperRectangle>> found;
  found.reserve(pairs.found().size());
  for (auto& [leaves, region] : pairs.found()) {
    std::vector<int32_t> key(leaves.size());
    for (size_t t = 0; t < leaves.size(); ++t) key[t] = ranks[t][leaves[t]];
    found.emplace_back(std::move(key), std::move(region));
  }
  pairs.found().clear();
  std::sort(found.begin(), found.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  UnstableSet out;
  out.rectangles.reserve(found.size());
  for (auto& [key, region] : found) {
    region.set_id(static_cast<int64_t>(out.rectangles.size()));
    out.rectangles.push_back(std::move(region));
  }
  return out;
}

UnstableSet AnalyzeClassesPairwise(std::span<const EquivalenceClass> classes,
                                   std::span<const FeatureId> sensitive,
                                   size_t num_features) {
  std::vector<bool> is_sensitive(num_features, false);
  for (FeatureId f : sensitive) is_sensitive[f] = true;
  std::vector<bool> unstable(classes.size(), false);
  for (size_t i = 0; i < classes.size(); ++i) {
    for (size_t j = i + 1; j < classes.size(); ++j) {
      const EquivalenceClass& a = classes[i];
      const EquivalenceClass& b = classes[j];
      if (a.label == b.label) continue;
      bool overlap = true;
      bool differs = false;
      for (size_t f = 0; f < num_features; ++f) {
        const Interval ia = a.region.Get(static_cast<FeatureId>(f));
        const Interval ib = b.region.Get(static_cast<FeatureId>(f));
        if (is_sensitive[f]) {
          differs = differs || !(ia == ib);
        } else if (!ia.Intersects(ib)) {
          overlap = false;
          break;
        }
      }
      if (overlap && differs) unstable[i] = unstable[j] = true;
    }
  }
  UnstableSet out;
  for (size_t i = 0; i < classes.size(); ++i) {
    if (!unstable[i]) continue;
    HyperRectangle h = classes[i].region;
    h.set_id(static_cast<int64_t>(out.rectangles.size()));
    out.rectangles.push_back(std::move(h));
  }
  return out;
}

FlipSet::FlipSet(const Ensemble& ensemble, std::span<const FeatureId> sensitive)
    : metadata_(&ensemble.metadata()) {
  const auto thresholds = ThresholdsPerFeature(ensemble);
  std::vector<FeatureId> sorted(sensitive.begin(), sensitive.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::vector<std::string> seen_groups;
  for (FeatureId f : sorted) {
    const Feature& feature = (*metadata_)[f];
    Axis axis;
    if (feature.kind == FeatureKind::kOneHot) {
      if (std::find(seen_groups.begin(), seen_groups.end(), *feature.group) !=
          seen_groups.end()) {
        continue;
      }
      seen_groups.push_back(*feature.group);
      axis.one_hot = true;
      for (FeatureId m : metadata_->GroupMembers(*feature.group)) {
        if (std::binary_search(sorted.begin(), sorted.end(), m)) {
          axis.features.push_back(m);
        }
      }
    } else if (feature.kind == FeatureKind::kBinary) {
      axis.features = {f};
      axis.values = {0.0, 1.0};
    } else {
      axis.features = {f};
      auto it = thresholds.find(f);
      if (it != thresholds.end()) {
        const std::vector<double>& t = it->second;
        axis.values.push_back(t.front() - 1.0);
        for (size_t i = 0; i < t.size(); ++i) {
          axis.values.push_back(t[i]);
          if (i + 1 < t.size()) axis.values.push_back(t[i] / 2 + t[i + 1] / 2);
        }
        axis.values.push_back(t.back() + 1.0);
      }
    }
    axes_.push_back(std::move(axis));
  }
}

std::vector<std::vector<double>> FlipSet::AxisOptions(
    const Axis& axis, std::span<const double> x) const {
  std::vector<std::vector<double>> out;
  if (!axis.one_hot) {
    std::vector<double> values = axis.values;
    const FeatureId f = axis.features.front();
    if ((*metadata_)[f].kind != FeatureKind::kBinary) {
      values.push_back(x[f]);
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
    }
    for (double v : values) out.push_back({v});
    return out;
  }
  // The active column of the group, if it is not one of ours, pins every
  // sensitive member to 0.
  const std::string& group = *(*metadata_)[axis.features.front()].group;
  bool active_elsewhere = false;
  for (FeatureId m : metadata_->GroupMembers(group)) {
    const bool ours = std::find(axis.features.begin(), axis.features.end(),
                                m) != axis.features.end();
    if (!ours && x[m] > 0.5) active_elsewhere = true;
  }
  std::vector<double> own;
  bool own_active = false;
  for (FeatureId m : axis.features) {
    own.push_back(x[m]);
    own_active = own_active || x[m] > 0.5;
  }
  if (active_elsewhere || !own_active) out.push_back(own);
  if (!active_elsewhere) {
    for (size_t i = 0; i < axis.features.size(); ++i) {
      std::vector<double> choice(axis.features.size(), 0.0);
      choice[i] = 1.0;
      out.push_back(std::move(choice));
    }
  }
  return out;
}

std::vector<Instance> FlipSet::Representatives(
    std::span<const double> x) const {
  std::vector<Instance> out;
  ForEach(x, [&out](const Instance& z) {
    out.push_back(z);
    return true;
  });
  return out;
}

std::vector<Instance> FlipSetRepresentatives(
    const Ensemble& ensemble, std::span<const FeatureId> sensitive,
    std::span<const double> x) {
  return FlipSet(ensemble, sensitive).Representatives(x);
}

}  // namespace fairsynth
