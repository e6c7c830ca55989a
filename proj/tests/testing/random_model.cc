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

#include "testing/random_model.h"

#include <algorithm>

namespace fairsynth::testing {
namespace {

int Uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

Tree RandomTree(std::mt19937_64& rng, const FeatureMetadata& metadata,
                int depth_left, double split_probability, bool force_split) {
  const bool split =
      depth_left > 0 &&
      (force_split ||
       std::uniform_real_distribution<double>(0, 1)(rng) < split_probability);
  if (!split) return Tree::Leaf(Uniform(rng, 0, 1));
  const FeatureId f = Uniform(rng, 0, static_cast<int>(metadata.size()) - 1);
  const double threshold = metadata[f].kind == FeatureKind::kNumeric
                               ? Uniform(rng, 1, 9) / 10.0
                               : 0.5;
  Tree left = RandomTree(rng, metadata, depth_left - 1, split_probability,
                         false);
  Tree right = RandomTree(rng, metadata, depth_left - 1, split_probability,
                          false);
  return Tree::Split(f, threshold, left, right);
}

// Values per independent axis: a single column, or a whole one-hot group.
struct GridAxis {
  std::vector<FeatureId> columns;
  std::vector<std::vector<double>> options;
};

std::vector<GridAxis> GridAxes(const Ensemble& ensemble) {
  const FeatureMetadata& metadata = ensemble.metadata();
  const auto thresholds = ThresholdsPerFeature(ensemble);
  std::vector<GridAxis> axes;
  for (const Feature& f : metadata.features()) {
    if (f.kind == FeatureKind::kOneHot) continue;
    GridAxis axis;
    axis.columns = {f.id};
    if (f.kind == FeatureKind::kBinary) {
      axis.options = {{0.0}, {1.0}};
    } else if (auto it = thresholds.find(f.id); it != thresholds.end()) {
      const std::vector<double>& t = it->second;
      axis.options.push_back({t.front() - 0.05});
      for (size_t i = 0; i + 1 < t.size(); ++i) {
        axis.options.push_back({(t[i] + t[i + 1]) / 2});
      }
      axis.options.push_back({t.back() + 0.05});
    } else {
      axis.options = {{0.5}};
    }
    axes.push_back(std::move(axis));
  }
  for (const std::string& g : metadata.GroupNames()) {
    GridAxis axis;
    axis.columns = metadata.GroupMembers(g);
    for (size_t i = 0; i < axis.columns.size(); ++i) {
      std::vector<double> choice(axis.columns.size(), 0.0);
      choice[i] = 1.0;
      axis.options.push_back(std::move(choice));
    }
    axes.push_back(std::move(axis));
  }
  return axes;
}

}  // namespace

Ensemble RandomEnsemble(std::mt19937_64& rng, const RandomModelParams& params) {
  const int num_features =
      Uniform(rng, params.min_features, params.max_features);
  std::vector<Feature> features;
  for (int f = 0; f < num_features; ++f) {
    Feature feature;
    feature.id = f;
    feature.name = "x" + std::to_string(f);
    feature.kind = f == 0 ? FeatureKind::kBinary : FeatureKind::kNumeric;
    features.push_back(std::move(feature));
  }
  for (int c = 0; c < params.one_hot_columns; ++c) {
    Feature feature;
    feature.id = static_cast<FeatureId>(features.size());
    feature.name = "color_" + std::string(1, static_cast<char>('a' + c));
    feature.kind = FeatureKind::kOneHot;
    feature.group = "color";
    features.push_back(std::move(feature));
  }
  FeatureMetadata metadata(std::move(features));

  const int num_trees = Uniform(rng, params.min_trees, params.max_trees);
  std::vector<Tree> trees;
  for (int t = 0; t < num_trees; ++t) {
    const int depth = Uniform(rng, params.min_depth, params.max_depth);
    trees.push_back(
        RandomTree(rng, metadata, depth, params.split_probability, true));
  }
  return Ensemble(std::move(trees), {"neg", "pos"}, std::move(metadata));
}

size_t ThresholdCellGridSize(const Ensemble& ensemble) {
  size_t n = 1;
  for (const GridAxis& axis : GridAxes(ensemble)) n *= axis.options.size();
  return n;
}

std::vector<Instance> ThresholdCellGrid(const Ensemble& ensemble) {
  const std::vector<GridAxis> axes = GridAxes(ensemble);
  std::vector<Instance> out;
  Instance x(ensemble.num_features(), 0.0);
  std::vector<size_t> pos(axes.size(), 0);
  while (true) {
    for (size_t a = 0; a < axes.size(); ++a) {
      for (size_t i = 0; i < axes[a].columns.size(); ++i) {
        x[axes[a].columns[i]] = axes[a].options[pos[a]][i];
      }
    }
    out.push_back(x);
    size_t a = 0;
    for (; a < axes.size(); ++a) {
      if (++pos[a] < axes[a].options.size()) break;
      pos[a] = 0;
    }
    if (a == axes.size()) break;
  }
  return out;
}

}  // namespace fairsynth::testing
