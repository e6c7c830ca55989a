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

#include "fairsynth/render.h"

#include <algorithm>
#include <map>
#include <optional>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace fairsynth {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct Draft {
  std::vector<Conjunct> conjuncts;
  std::vector<size_t> sources;
  // Once a draft absorbed another one through group g, only further merges
  // on g keep the union exact.
  std::optional<std::string> merged_on;
};

std::vector<Conjunct> ToConjuncts(const Itemset& itemset,
                                  const FeatureMetadata& metadata) {
  std::vector<Conjunct> out;
  // Position in `out` of each group's conjuncts, plus the collected columns.
  struct GroupState {
    size_t slot;
    std::vector<FeatureId> active;
    std::vector<FeatureId> inactive;
  };
  std::vector<std::pair<std::string, GroupState>> groups;

  for (const auto& [feature, range] : itemset.region().entries()) {
    const Feature& f = metadata[feature];
    const bool has0 = range.Contains(0.0);
    const bool has1 = range.Contains(1.0);
    if (f.kind == FeatureKind::kBinary && has0 != has1) {
      out.push_back(BinaryConjunct{feature, has1 ? 1 : 0});
      continue;
    }
    if (f.kind == FeatureKind::kOneHot && has0 != has1) {
      auto it = std::find_if(groups.begin(), groups.end(),
                             [&](const auto& g) { return g.first == *f.group; });
      if (it == groups.end()) {
        groups.push_back({*f.group, GroupState{out.size(), {}, {}}});
        out.emplace_back();  // Placeholder, filled below.
        it = std::prev(groups.end());
      }
      (has1 ? it->second.active : it->second.inactive).push_back(feature);
      continue;
    }
    out.push_back(RangeConjunct{feature, range});
  }

  // Expand group placeholders back to front so earlier slots stay valid.
  for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
    const auto& [group, state] = *it;
    std::vector<Conjunct> expansion;
    if (!state.active.empty()) {
      // An active column already rules out every other column of the group.
      for (FeatureId c : state.active) {
        expansion.push_back(CategoryInConjunct{group, {c}});
      }
    } else {
      expansion.push_back(CategoryNotInConjunct{group, state.inactive});
    }
    out.erase(out.begin() + state.slot);
    out.insert(out.begin() + state.slot, expansion.begin(), expansion.end());
  }
  return out;
}

std::string RenderAll(const std::vector<Conjunct>& conjuncts,
                      const FeatureMetadata& metadata) {
  if (conjuncts.empty()) return "TRUE";
  std::vector<std::string> parts;
  for (const Conjunct& c : conjuncts) {
    parts.push_back(RenderConjunct(c, metadata));
  }
  return absl::StrJoin(parts, " ∧ ");
}

// Text of all conjuncts but `skip`, used as the merge key.
std::string KeyWithout(const std::vector<Conjunct>& conjuncts, size_t skip,
                       const FeatureMetadata& metadata) {
  std::string key;
  for (size_t i = 0; i < conjuncts.size(); ++i) {
    if (i == skip) continue;
    absl::StrAppend(&key, "\x1f", RenderConjunct(conjuncts[i], metadata));
  }
  return key;
}

}  // namespace

std::string RenderConjunct(const Conjunct& conjunct,
                           const FeatureMetadata& metadata) {
  return std::visit(
      Overloaded{
          [&](const RangeConjunct& c) {
            const std::string& name = metadata[c.feature].name;
            const double lo = c.range.lo();
            const double hi = c.range.hi();
            if (lo == -kInf && hi == kInf) return absl::StrCat("TRUE");
            if (lo == -kInf) {
              return absl::StrCat(name, " ≤ ", FormatNumber(hi));
            }
            if (hi == kInf) return absl::StrCat(name, " > ", FormatNumber(lo));
            return absl::StrCat(FormatNumber(lo), " < ", name, " ≤ ",
                                FormatNumber(hi));
          },
          [&](const BinaryConjunct& c) {
            return absl::StrCat(metadata[c.feature].name, " = ", c.value);
          },
          [&](const CategoryInConjunct& c) {
            std::vector<std::string> parts;
            for (FeatureId col : c.columns) {
              parts.push_back(
                  absl::StrCat(c.group, " = ", metadata.OneHotValue(col)));
            }
            const std::string joined = absl::StrJoin(parts, " ∨ ");
            return parts.size() > 1 ? absl::StrCat("(", joined, ")") : joined;
          },
          [&](const CategoryNotInConjunct& c) {
            std::vector<std::string> parts;
            for (FeatureId col : c.columns) {
              parts.push_back(absl::StrCat(c.group, " ≠ ",
                                           metadata.OneHotValue(col)));
            }
            return absl::StrJoin(parts, " ∧ ");
          },
      },
      conjunct);
}

bool RenderedFormula::Matches(std::span<const double> x) const {
  for (const Conjunct& conjunct : conjuncts) {
    const bool ok = std::visit(
        Overloaded{
            [&](const RangeConjunct& c) { return c.range.Contains(x[c.feature]); },
            [&](const BinaryConjunct& c) {
              return (x[c.feature] > 0.5) == (c.value == 1);
            },
            [&](const CategoryInConjunct& c) {
              return std::any_of(c.columns.begin(), c.columns.end(),
                                 [&](FeatureId f) { return x[f] > 0.5; });
            },
            [&](const CategoryNotInConjunct& c) {
              return std::none_of(c.columns.begin(), c.columns.end(),
                                  [&](FeatureId f) { return x[f] > 0.5; });
            },
        },
        conjunct);
    if (!ok) return false;
  }
  return true;
}

std::vector<RenderedFormula> RenderFormulas(std::span<const Itemset> itemsets,
                                            const FeatureMetadata& metadata) {
  std::vector<Draft> drafts;
  // (key without one single-valued equality, group) -> draft index.
  std::map<std::pair<std::string, std::string>, size_t> open;

  for (size_t s = 0; s < itemsets.size(); ++s) {
    std::vector<Conjunct> conjuncts = ToConjuncts(itemsets[s], metadata);
    bool merged = false;
    for (size_t i = 0; i < conjuncts.size() && !merged; ++i) {
      const auto* eq = std::get_if<CategoryInConjunct>(&conjuncts[i]);
      if (eq == nullptr) continue;
      auto it = open.find({KeyWithout(conjuncts, i, metadata), eq->group});
      if (it == open.end()) continue;
      Draft& target = drafts[it->second];
      if (target.merged_on && *target.merged_on != eq->group) continue;
      for (Conjunct& tc : target.conjuncts) {
        auto* teq = std::get_if<CategoryInConjunct>(&tc);
        if (teq == nullptr || teq->group != eq->group) continue;
        for (FeatureId col : eq->columns) {
          if (std::find(teq->columns.begin(), teq->columns.end(), col) ==
              teq->columns.end()) {
            teq->columns.push_back(col);
          }
        }
        break;
      }
      target.merged_on = eq->group;
      target.sources.push_back(s);
      merged = true;
    }
    if (merged) continue;

    const size_t index = drafts.size();
    for (size_t i = 0; i < conjuncts.size(); ++i) {
      const auto* eq = std::get_if<CategoryInConjunct>(&conjuncts[i]);
      if (eq == nullptr) continue;
      open.emplace(std::make_pair(KeyWithout(conjuncts, i, metadata), eq->group),
                   index);
    }
    drafts.push_back({std::move(conjuncts), {s}, std::nullopt});
  }

  std::vector<RenderedFormula> out;
  out.reserve(drafts.size());
  for (Draft& d : drafts) {
    RenderedFormula f;
    f.text = RenderAll(d.conjuncts, metadata);
    f.conjuncts = std::move(d.conjuncts);
    f.sources = std::move(d.sources);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace fairsynth
