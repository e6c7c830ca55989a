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

#include "fairsynth/model.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace fairsynth {
namespace {

using nlohmann::json;

absl::Status ErrorAt(absl::string_view where, absl::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat(where, ": ", what));
}

absl::StatusOr<FeatureKind> ParseKind(std::string_view s) {
  if (s == "numeric") return FeatureKind::kNumeric;
  if (s == "binary") return FeatureKind::kBinary;
  if (s == "onehot") return FeatureKind::kOneHot;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown feature kind \"", std::string(s), "\""));
}

class NodeParser {
 public:
  NodeParser(size_t num_features, size_t num_labels)
      : num_features_(num_features), num_labels_(num_labels) {}

  absl::Status Parse(const json& j, const std::string& where,
                     std::vector<Tree::Node>* nodes) {
    if (!j.is_object()) return ErrorAt(where, "node must be an object");
    const int32_t index = static_cast<int32_t>(nodes->size());
    nodes->emplace_back();
    if (j.contains("leaf")) {
      const json& leaf = j["leaf"];
      if (!leaf.is_number_integer()) {
        return ErrorAt(where, "leaf label must be an integer");
      }
      const int64_t label = leaf.get<int64_t>();
      if (label < 0 || static_cast<size_t>(label) >= num_labels_) {
        return ErrorAt(where, absl::StrCat("label id ", label,
                                           " out of range (model has ",
                                           num_labels_, " labels)"));
      }
      (*nodes)[index].label = static_cast<LabelId>(label);
      return absl::OkStatus();
    }
    for (const char* key : {"feature", "threshold", "left", "right"}) {
      if (!j.contains(key)) {
        return ErrorAt(where, absl::StrCat("missing \"", key, "\""));
      }
    }
    if (!j["feature"].is_number_integer()) {
      return ErrorAt(where, "feature must be an integer");
    }
    const int64_t feature = j["feature"].get<int64_t>();
    if (feature < 0 || static_cast<size_t>(feature) >= num_features_) {
      return ErrorAt(where, absl::StrCat("unknown feature ", feature,
                                         " (model has ", num_features_,
                                         " features)"));
    }
    if (!j["threshold"].is_number()) {
      return ErrorAt(where, "threshold must be a number");
    }
    const double threshold = j["threshold"].get<double>();
    if (!std::isfinite(threshold)) {
      return ErrorAt(where, "threshold must be finite");
    }
    (*nodes)[index].feature = static_cast<FeatureId>(feature);
    (*nodes)[index].threshold = threshold;

    (*nodes)[index].left = static_cast<int32_t>(nodes->size());
    if (auto s = Parse(j["left"], where + ".left", nodes); !s.ok()) return s;
    (*nodes)[index].right = static_cast<int32_t>(nodes->size());
    return Parse(j["right"], where + ".right", nodes);
  }

 private:
  size_t num_features_;
  size_t num_labels_;
};

json NodeToJson(const Tree& tree, int32_t i) {
  const Tree::Node& n = tree.node(i);
  if (n.is_leaf()) return json{{"leaf", n.label}};
  return json{{"feature", n.feature},
              {"threshold", n.threshold},
              {"left", NodeToJson(tree, n.left)},
              {"right", NodeToJson(tree, n.right)}};
}

}  // namespace

std::string_view FeatureKindName(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kNumeric:
      return "numeric";
    case FeatureKind::kBinary:
      return "binary";
    case FeatureKind::kOneHot:
      return "onehot";
  }
  return "numeric";
}

FeatureMetadata::FeatureMetadata(std::vector<Feature> features)
    : features_(std::move(features)) {}

absl::Status FeatureMetadata::Validate() const {
  std::map<std::string, FeatureKind> group_kinds;
  for (size_t i = 0; i < features_.size(); ++i) {
    const Feature& f = features_[i];
    const std::string where = absl::StrCat("features[", i, "]");
    if (f.id != static_cast<FeatureId>(i)) {
      return ErrorAt(where, absl::StrCat("feature id ", f.id,
                                         " must equal its position ", i));
    }
    if (f.kind == FeatureKind::kOneHot) {
      if (!f.group || f.group->empty()) {
        return ErrorAt(where, absl::StrCat("onehot feature \"", f.name,
                                           "\" without group"));
      }
    } else if (f.group) {
      return ErrorAt(where, absl::StrCat("feature \"", f.name,
                                         "\" has a group but is not onehot"));
    }
  }
  std::set<std::string_view> names;
  for (const Feature& f : features_) {
    if (!names.insert(f.name).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate feature name \"", f.name, "\""));
    }
  }
  return absl::OkStatus();
}

std::optional<FeatureId> FeatureMetadata::FindByName(
    std::string_view name) const {
  for (const Feature& f : features_) {
    if (f.name == name) return f.id;
  }
  return std::nullopt;
}

std::vector<FeatureId> FeatureMetadata::GroupMembers(
    std::string_view group) const {
  std::vector<FeatureId> out;
  for (const Feature& f : features_) {
    if (f.group && *f.group == group) out.push_back(f.id);
  }
  return out;
}

std::vector<std::string> FeatureMetadata::GroupNames() const {
  std::vector<std::string> out;
  for (const Feature& f : features_) {
    if (f.group && std::find(out.begin(), out.end(), *f.group) == out.end()) {
      out.push_back(*f.group);
    }
  }
  return out;
}

std::string FeatureMetadata::OneHotValue(FeatureId f) const {
  const Feature& feature = features_[f];
  if (!feature.group) return feature.name;
  const std::string prefix = *feature.group + "_";
  if (feature.name.size() > prefix.size() &&
      feature.name.compare(0, prefix.size(), prefix) == 0) {
    return feature.name.substr(prefix.size());
  }
  return feature.name;
}

Tree Tree::Leaf(LabelId label) {
  Node n;
  n.label = label;
  return Tree({n});
}

Tree Tree::Split(FeatureId feature, double threshold, const Tree& left,
                 const Tree& right) {
  std::vector<Node> nodes(1);
  nodes[0].feature = feature;
  nodes[0].threshold = threshold;
  auto append = [&nodes](const Tree& sub) {
    const int32_t offset = static_cast<int32_t>(nodes.size());
    for (Node n : sub.nodes_) {
      if (!n.is_leaf()) {
        n.left += offset;
        n.right += offset;
      }
      nodes.push_back(n);
    }
    return offset;
  };
  nodes[0].left = append(left);
  nodes[0].right = append(right);
  return Tree(std::move(nodes));
}

int32_t Tree::LeafIndex(std::span<const double> x) const {
  int32_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const Node& n = nodes_[i];
    i = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return i;
}

LabelId Tree::Predict(std::span<const double> x) const {
  return nodes_[LeafIndex(x)].label;
}

std::optional<HyperRectangle> Tree::PathRegion(int32_t leaf) const {
  std::vector<int32_t> parent(nodes_.size(), -1);
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (!nodes_[i].is_leaf()) {
      parent[nodes_[i].left] = static_cast<int32_t>(i);
      parent[nodes_[i].right] = static_cast<int32_t>(i);
    }
  }
  HyperRectangle region;
  for (int32_t child = leaf, p = parent[leaf]; p >= 0;
       child = p, p = parent[p]) {
    const Node& n = nodes_[p];
    const Interval side = child == n.left ? Interval::AtMost(n.threshold)
                                          : Interval::GreaterThan(n.threshold);
    if (!region.Restrict(n.feature, side)) return std::nullopt;
  }
  return region;
}

int Tree::Depth() const {
  std::function<int(int32_t)> depth = [&](int32_t i) -> int {
    const Node& n = nodes_[i];
    if (n.is_leaf()) return 0;
    return 1 + std::max(depth(n.left), depth(n.right));
  };
  return depth(0);
}

int Tree::NumInternalNodes() const {
  return static_cast<int>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const Node& n) { return !n.is_leaf(); }));
}

Ensemble::Ensemble(std::vector<Tree> trees, std::vector<std::string> labels,
                   FeatureMetadata metadata)
    : trees_(std::move(trees)),
      labels_(std::move(labels)),
      metadata_(std::move(metadata)) {}

absl::Status Ensemble::Validate() const {
  if (auto s = metadata_.Validate(); !s.ok()) return s;
  if (labels_.empty()) return absl::InvalidArgumentError("no labels");
  if (trees_.empty()) return absl::InvalidArgumentError("no trees");
  for (size_t t = 0; t < trees_.size(); ++t) {
    const auto nodes = trees_[t].nodes();
    if (nodes.empty()) {
      return ErrorAt(absl::StrCat("trees[", t, "]"), "empty tree");
    }
    // Children must point forward, which rules out cycles.
    for (size_t i = 0; i < nodes.size(); ++i) {
      const std::string where = absl::StrCat("trees[", t, "].nodes[", i, "]");
      const Tree::Node& n = nodes[i];
      if (n.is_leaf()) {
        if (n.label < 0 || static_cast<size_t>(n.label) >= labels_.size()) {
          return ErrorAt(where, absl::StrCat("label id ", n.label,
                                             " out of range"));
        }
        continue;
      }
      if (static_cast<size_t>(n.feature) >= metadata_.size()) {
        return ErrorAt(where, absl::StrCat("unknown feature ", n.feature));
      }
      if (!std::isfinite(n.threshold)) {
        return ErrorAt(where, "threshold must be finite");
      }
      const auto in_range = [&](int32_t c) {
        return c > static_cast<int32_t>(i) &&
               c < static_cast<int32_t>(nodes.size());
      };
      if (!in_range(n.left) || !in_range(n.right)) {
        return ErrorAt(where, "invalid child index");
      }
    }
  }
  return absl::OkStatus();
}

LabelId MajorityLabel(std::span<const int32_t> votes) {
  LabelId best = 0;
  for (size_t l = 1; l < votes.size(); ++l) {
    if (votes[l] > votes[best]) best = static_cast<LabelId>(l);
  }
  return best;
}

LabelId Ensemble::Predict(std::span<const double> x) const {
  std::vector<int32_t> votes(labels_.size(), 0);
  for (const Tree& t : trees_) ++votes[t.Predict(x)];
  return MajorityLabel(votes);
}

absl::StatusOr<Ensemble> ParseModel(std::string_view text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return absl::InvalidArgumentError("malformed JSON");
  if (!j.is_object()) return ErrorAt("$", "model must be a JSON object");
  for (const char* key : {"num_features", "labels", "features", "trees"}) {
    if (!j.contains(key)) {
      return ErrorAt("$", absl::StrCat("missing \"", key, "\""));
    }
  }
  if (!j["num_features"].is_number_integer()) {
    return ErrorAt("num_features", "must be an integer");
  }
  const int64_t num_features = j["num_features"].get<int64_t>();

  if (!j["labels"].is_array()) return ErrorAt("labels", "must be an array");
  std::vector<std::string> labels;
  for (size_t i = 0; i < j["labels"].size(); ++i) {
    const json& l = j["labels"][i];
    if (!l.is_string()) {
      return ErrorAt(absl::StrCat("labels[", i, "]"), "must be a string");
    }
    labels.push_back(l.get<std::string>());
  }

  if (!j["features"].is_array()) {
    return ErrorAt("features", "must be an array");
  }
  std::vector<Feature> features;
  for (size_t i = 0; i < j["features"].size(); ++i) {
    const json& f = j["features"][i];
    const std::string where = absl::StrCat("features[", i, "]");
    if (!f.is_object() || !f.contains("id") || !f.contains("name") ||
        !f.contains("kind") || !f["id"].is_number_integer() ||
        !f["name"].is_string() || !f["kind"].is_string()) {
      return ErrorAt(where, "expected {id: int, name: string, kind: string}");
    }
    Feature feature;
    feature.id = f["id"].get<FeatureId>();
    feature.name = f["name"].get<std::string>();
    auto kind = ParseKind(f["kind"].get<std::string>());
    if (!kind.ok()) return ErrorAt(where, kind.status().message());
    feature.kind = *kind;
    if (f.contains("group") && !f["group"].is_null()) {
      if (!f["group"].is_string()) {
        return ErrorAt(where, "group must be a string or null");
      }
      feature.group = f["group"].get<std::string>();
    }
    features.push_back(std::move(feature));
  }
  if (num_features != static_cast<int64_t>(features.size())) {
    return ErrorAt("num_features",
                   absl::StrCat(num_features, " does not match ",
                                features.size(), " feature entries"));
  }

  if (!j["trees"].is_array()) return ErrorAt("trees", "must be an array");
  NodeParser parser(features.size(), labels.size());
  std::vector<Tree> trees;
  for (size_t t = 0; t < j["trees"].size(); ++t) {
    std::vector<Tree::Node> nodes;
    if (auto s = parser.Parse(j["trees"][t], absl::StrCat("trees[", t, "]"),
                              &nodes);
        !s.ok()) {
      return s;
    }
    trees.emplace_back(std::move(nodes));
  }

  Ensemble ensemble(std::move(trees), std::move(labels),
                    FeatureMetadata(std::move(features)));
  if (auto s = ensemble.Validate(); !s.ok()) return s;
  return ensemble;
}

absl::StatusOr<Ensemble> LoadModel(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buf;
  buf << in.rdbuf();
  auto model = ParseModel(buf.str());
  if (!model.ok()) {
    return absl::Status(model.status().code(),
                        absl::StrCat(path, ": ", model.status().message()));
  }
  return model;
}

std::string SerializeModel(const Ensemble& ensemble) {
  json features = json::array();
  for (const Feature& f : ensemble.metadata().features()) {
    features.push_back({{"id", f.id},
                        {"name", f.name},
                        {"kind", std::string(FeatureKindName(f.kind))},
                        {"group", f.group ? json(*f.group) : json(nullptr)}});
  }
  json trees = json::array();
  for (const Tree& t : ensemble.trees()) trees.push_back(NodeToJson(t, 0));
  json j = {{"num_features", ensemble.num_features()},
            {"labels", std::vector<std::string>(ensemble.labels().begin(),
                                        ensemble.labels().end())},
            {"features", features},
            {"trees", trees}};
  return j.dump(1);
}

std::map<FeatureId, std::vector<double>> ThresholdsPerFeature(
    const Ensemble& ensemble) {
  std::map<FeatureId, std::vector<double>> out;
  for (const Tree& t : ensemble.trees()) {
    for (const Tree::Node& n : t.nodes()) {
      if (!n.is_leaf()) out[n.feature].push_back(n.threshold);
    }
  }
  for (auto& [feature, values] : out) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
  }
  return out;
}

}  // namespace fairsynth
