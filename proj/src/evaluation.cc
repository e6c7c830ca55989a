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

#include "fairsynth/evaluation.h"

#include <algorithm>
#include <fstream>
#include <random>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace fairsynth {
namespace {

// 2^53: beyond this a double no longer counts instances exactly.
constexpr size_t kMaxExactCount = size_t{1} << 53;

absl::Status CheckScorable(const InstanceSet& data) {
  if (data.empty()) {
    return absl::InvalidArgumentError("cannot score an empty instance set");
  }
  if (data.size() > kMaxExactCount) {
    return absl::InvalidArgumentError("instance set too large to score");
  }
  return absl::OkStatus();
}

double UnitUniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

absl::Status ValidateInstances(const InstanceSet& data,
                               const FeatureMetadata& metadata) {
  const auto groups = metadata.GroupNames();
  std::vector<std::vector<FeatureId>> members;
  for (const std::string& g : groups) members.push_back(metadata.GroupMembers(g));
  for (size_t i = 0; i < data.size(); ++i) {
    const Instance& x = data.instances[i];
    if (x.size() != metadata.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("instance ", i, " has ", x.size(),
                       " values; the model has ", metadata.size(),
                       " features"));
    }
    for (size_t g = 0; g < groups.size(); ++g) {
      const auto active = std::count_if(
          members[g].begin(), members[g].end(),
          [&](FeatureId f) { return x[f] > 0.5; });
      if (active != 1) {
        return absl::InvalidArgumentError(
            absl::StrCat("instance ", i, " has ", active,
                         " active columns in one-hot group \"", groups[g],
                         "\""));
      }
    }
  }
  if (data.labels && data.labels->size() != data.size()) {
    return absl::InvalidArgumentError("label count differs from instances");
  }
  return absl::OkStatus();
}

size_t CountUnstable(const UnstableSet& unstable, const InstanceSet& data) {
  return static_cast<size_t>(
      std::count_if(data.instances.begin(), data.instances.end(),
                    [&](const Instance& x) { return unstable.Contains(x); }));
}

size_t CountCovered(std::span<const Itemset> conditions,
                    const InstanceSet& data) {
  return static_cast<size_t>(std::count_if(
      data.instances.begin(), data.instances.end(), [&](const Instance& x) {
        return std::any_of(
            conditions.begin(), conditions.end(),
            [&](const Itemset& c) { return c.region().Contains(x); });
      }));
}

absl::StatusOr<double> ScoreD(const UnstableSet& unstable,
                              const InstanceSet& data) {
  if (auto s = CheckScorable(data); !s.ok()) return s;
  return static_cast<double>(CountUnstable(unstable, data)) /
         static_cast<double>(data.size());
}

absl::StatusOr<double> ScoreDTilde(std::span<const Itemset> conditions,
                                   const InstanceSet& data) {
  if (auto s = CheckScorable(data); !s.ok()) return s;
  const size_t uncovered = data.size() - CountCovered(conditions, data);
  return static_cast<double>(uncovered) / static_cast<double>(data.size());
}

std::optional<double> Accuracy(const Ensemble& ensemble,
                               const InstanceSet& data) {
  if (!data.labels || data.empty()) return std::nullopt;
  size_t correct = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    if (ensemble.Predict(data.instances[i]) == (*data.labels)[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

DiscriminationOracle::DiscriminationOracle(const Ensemble& ensemble,
                                           std::span<const FeatureId> sensitive)
    : ensemble_(&ensemble), flips_(ensemble, sensitive) {}

bool DiscriminationOracle::IsDiscriminated(std::span<const double> x) const {
  if (flips_.empty()) return false;
  const LabelId base = ensemble_->Predict(x);
  return !flips_.ForEach(
      x, [&](const Instance& z) { return ensemble_->Predict(z) == base; });
}

bool OracleIsDiscriminated(const Ensemble& ensemble,
                           std::span<const FeatureId> sensitive,
                           std::span<const double> x) {
  return DiscriminationOracle(ensemble, sensitive).IsDiscriminated(x);
}

std::vector<CoveragePoint> CoverageCurve(const FormulaSet& formulas,
                                         const DiscriminationOracle& oracle,
                                         const InstanceSet& data, int k_max) {
  // Earliest iteration covering each fair instance, or k_max + 1.
  std::vector<size_t> first_covered(static_cast<size_t>(k_max) + 2, 0);
  size_t fair = 0;
  for (const Instance& x : data.instances) {
    if (oracle.IsDiscriminated(x)) continue;
    ++fair;
    int earliest = k_max + 1;
    for (size_t i = 0; i < formulas.size(); ++i) {
      if (formulas.found_at[i] < earliest &&
          formulas.itemsets[i].region().Contains(x)) {
        earliest = formulas.found_at[i];
      }
    }
    ++first_covered[std::max(earliest, 0)];
  }
  std::vector<CoveragePoint> curve;
  size_t covered = first_covered[0];
  for (int k = 1; k <= k_max; ++k) {
    covered += first_covered[k];
    CoveragePoint p;
    p.iteration = k;
    p.covered = covered;
    p.fair = fair;
    p.fraction = fair == 0 ? 1.0
                           : static_cast<double>(covered) /
                                 static_cast<double>(fair);
    curve.push_back(p);
  }
  return curve;
}

absl::StatusOr<std::vector<CoveragePoint>> CoverageCurve(
    const Ensemble& ensemble, std::span<const FeatureId> sensitive,
    const InstanceSet& data, int k_max, SynthesisOptions options) {
  if (k_max < 1) return absl::InvalidArgumentError("k_max must be positive");
  options.max_iters = k_max;
  auto formulas = Synthesize(ensemble, sensitive, options);
  if (!formulas.ok()) return formulas.status();
  return CoverageCurve(*formulas, DiscriminationOracle(ensemble, sensitive),
                       data, k_max);
}

std::vector<RankedCondition> TopKGreedy(std::span<const Itemset> conditions,
                                        const InstanceSet& data, size_t k) {
  // members[c]: instances inside condition c.
  std::vector<std::vector<uint32_t>> members(conditions.size());
  for (size_t c = 0; c < conditions.size(); ++c) {
    for (size_t i = 0; i < data.size(); ++i) {
      if (conditions[c].region().Contains(data.instances[i])) {
        members[c].push_back(static_cast<uint32_t>(i));
      }
    }
  }
  std::vector<bool> covered(data.size(), false);
  std::vector<bool> taken(conditions.size(), false);
  std::vector<RankedCondition> out;
  size_t total = 0;
  while (out.size() < k) {
    std::optional<size_t> best;
    size_t best_gain = 0;
    for (size_t c = 0; c < conditions.size(); ++c) {
      if (taken[c]) continue;
      const size_t gain = static_cast<size_t>(
          std::count_if(members[c].begin(), members[c].end(),
                        [&](uint32_t i) { return !covered[i]; }));
      if (gain == 0) continue;
      if (!best || gain > best_gain ||
          (gain == best_gain &&
           CompareItemsets(conditions[c], conditions[*best]) < 0)) {
        best = c;
        best_gain = gain;
      }
    }
    if (!best) break;
    taken[*best] = true;
    for (uint32_t i : members[*best]) covered[i] = true;
    total += best_gain;
    out.push_back({*best, best_gain, total});
  }
  return out;
}

InstanceSet GenRandomInstances(const FeatureMetadata& metadata, size_t n,
                               uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto groups = metadata.GroupNames();
  std::vector<std::vector<FeatureId>> members;
  for (const std::string& g : groups) members.push_back(metadata.GroupMembers(g));

  InstanceSet out;
  out.provenance = Provenance::kRandom;
  out.instances.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    Instance x(metadata.size(), 0.0);
    for (const Feature& f : metadata.features()) {
      switch (f.kind) {
        case FeatureKind::kNumeric:
          x[f.id] = UnitUniform(rng);
          break;
        case FeatureKind::kBinary:
          x[f.id] = static_cast<double>(rng() & 1);
          break;
        case FeatureKind::kOneHot:
          break;
      }
    }
    for (const auto& m : members) {
      const auto pick = std::min<size_t>(
          static_cast<size_t>(UnitUniform(rng) * m.size()), m.size() - 1);
      x[m[pick]] = 1.0;
    }
    out.instances.push_back(std::move(x));
  }
  return out;
}

absl::StatusOr<InstanceSet> ReadDatasetCsv(const std::string& path,
                                           const Ensemble& ensemble,
                                           Provenance provenance) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  const FeatureMetadata& metadata = ensemble.metadata();

  std::string line;
  if (!std::getline(in, line)) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": missing header"));
  }
  std::vector<std::string> header =
      absl::StrSplit(absl::StripTrailingAsciiWhitespace(line), ',');
  bool has_label = false;
  if (!header.empty() && header.back() == "label") {
    has_label = true;
    header.pop_back();
  }
  if (header.size() != metadata.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        path, ": dimension mismatch: ", header.size(),
        " feature columns, the model has ", metadata.size(), " features"));
  }
  for (size_t f = 0; f < header.size(); ++f) {
    if (header[f] != metadata[static_cast<FeatureId>(f)].name) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": column ", f, " is \"", header[f],
                       "\", expected \"",
                       metadata[static_cast<FeatureId>(f)].name, "\""));
    }
  }

  InstanceSet out;
  out.provenance = provenance;
  if (has_label) out.labels.emplace();
  const auto labels = ensemble.labels();
  for (size_t row = 2; std::getline(in, line); ++row) {
    const absl::string_view trimmed = absl::StripTrailingAsciiWhitespace(line);
    if (trimmed.empty()) continue;
    std::vector<absl::string_view> cells = absl::StrSplit(trimmed, ',');
    if (cells.size() != header.size() + (has_label ? 1 : 0)) {
      return absl::InvalidArgumentError(absl::StrCat(
          path, ":", row, ": expected ", header.size() + (has_label ? 1 : 0),
          " values, found ", cells.size()));
    }
    Instance x(header.size());
    for (size_t f = 0; f < header.size(); ++f) {
      if (!absl::SimpleAtod(cells[f], &x[f])) {
        return absl::InvalidArgumentError(
            absl::StrCat(path, ":", row, ": bad number \"", cells[f], "\""));
      }
    }
    if (has_label) {
      const absl::string_view cell = cells.back();
      auto it = std::find(labels.begin(), labels.end(), std::string(cell));
      int64_t id = -1;
      if (it != labels.end()) {
        id = it - labels.begin();
      } else if (!absl::SimpleAtoi(cell, &id) || id < 0 ||
                 static_cast<size_t>(id) >= labels.size()) {
        return absl::InvalidArgumentError(
            absl::StrCat(path, ":", row, ": unknown label \"", cell, "\""));
      }
      out.labels->push_back(static_cast<LabelId>(id));
    }
    out.instances.push_back(std::move(x));
  }
  return out;
}

}  // namespace fairsynth
