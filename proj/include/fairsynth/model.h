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

// Decision-tree ensembles with majority-vote prediction.

#ifndef FAIRSYNTH_MODEL_H_
#define FAIRSYNTH_MODEL_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "fairsynth/geometry.h"

namespace fairsynth {

using LabelId = int32_t;

enum class FeatureKind { kNumeric, kBinary, kOneHot };

std::string_view FeatureKindName(FeatureKind kind);

struct Feature {
  FeatureId id = 0;
  std::string name;
  FeatureKind kind = FeatureKind::kNumeric;
  // Name of the categorical attribute this column encodes; set iff kOneHot.
  std::optional<std::string> group;
};

class FeatureMetadata {
 public:
  FeatureMetadata() = default;
  // Features must be indexed 0..n-1 in order; see Validate().
  explicit FeatureMetadata(std::vector<Feature> features);

  absl::Status Validate() const;

  size_t size() const { return features_.size(); }
  const Feature& operator[](FeatureId f) const { return features_[f]; }
  std::span<const Feature> features() const { return features_; }

  std::optional<FeatureId> FindByName(std::string_view name) const;
  bool IsOneHot(FeatureId f) const {
    return features_[f].kind == FeatureKind::kOneHot;
  }
  // Columns encoding `group`, ascending. Empty when the group is unknown.
  std::vector<FeatureId> GroupMembers(std::string_view group) const;
  // Distinct group names in order of first appearance.
  std::vector<std::string> GroupNames() const;
  // The categorical value a one-hot column stands for: its name with a
  // leading "<group>_" removed when present.
  std::string OneHotValue(FeatureId f) const;

 private:
  std::vector<Feature> features_;
};

// A single tree stored as a flat node array; node 0 is the root.
class Tree {
 public:
  struct Node {
    // Leaf iff feature < 0.
    FeatureId feature = -1;
    double threshold = 0.0;
    int32_t left = -1;
    int32_t right = -1;
    LabelId label = 0;

    bool is_leaf() const { return feature < 0; }
  };

  Tree() = default;
  explicit Tree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  // Builders for hand-written trees; children are appended after the parent.
  static Tree Leaf(LabelId label);
  static Tree Split(FeatureId feature, double threshold, const Tree& left,
                    const Tree& right);

  std::span<const Node> nodes() const { return nodes_; }
  const Node& node(int32_t i) const { return nodes_[i]; }
  const Node& root() const { return nodes_.front(); }

  // Traverses left iff x[feature] <= threshold.
  LabelId Predict(std::span<const double> x) const;
  // Index of the leaf reached by x.
  int32_t LeafIndex(std::span<const double> x) const;
  // Region of the root-to-leaf path ending at `leaf`; nullopt when
  // contradictory splits make the leaf unreachable.
  std::optional<HyperRectangle> PathRegion(int32_t leaf) const;

  int Depth() const;
  int NumInternalNodes() const;

 private:
  std::vector<Node> nodes_;
};

class Ensemble {
 public:
  Ensemble(std::vector<Tree> trees, std::vector<std::string> labels,
           FeatureMetadata metadata);

  // Checks the structural invariants: non-empty tree list, valid feature ids
  // and label ids, acyclic child links, finite thresholds.
  absl::Status Validate() const;

  std::span<const Tree> trees() const { return trees_; }
  std::span<const std::string> labels() const { return labels_; }
  const FeatureMetadata& metadata() const { return metadata_; }
  size_t num_features() const { return metadata_.size(); }
  size_t num_labels() const { return labels_.size(); }

  // Majority vote; ties go to the smallest label id.
  LabelId Predict(std::span<const double> x) const;

 private:
  std::vector<Tree> trees_;
  std::vector<std::string> labels_;
  FeatureMetadata metadata_;
};

// Majority vote over per-label counts; ties go to the smallest label id.
LabelId MajorityLabel(std::span<const int32_t> votes);

absl::StatusOr<Ensemble> ParseModel(std::string_view json);
absl::StatusOr<Ensemble> LoadModel(const std::string& path);
std::string SerializeModel(const Ensemble& ensemble);

// Sorted distinct thresholds per feature. Features never split on are absent.
std::map<FeatureId, std::vector<double>> ThresholdsPerFeature(
    const Ensemble& ensemble);

}  // namespace fairsynth

#endif  // FAIRSYNTH_MODEL_H_
