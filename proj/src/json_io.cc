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

#include "fairsynth/json_io.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"

namespace fairsynth {
namespace {

using nlohmann::json;

json BoundToJson(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "+inf";
  return v;
}

absl::StatusOr<double> BoundFromJson(const json& j, bool is_lo) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (is_lo && s == "-inf") return -kInf;
    if (!is_lo && s == "+inf") return kInf;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("bad ", is_lo ? "lo" : "hi", " bound ", j.dump()));
}

}  // namespace

json RectangleToJson(const HyperRectangle& rectangle) {
  json intervals = json::object();
  for (const auto& [feature, bound] : rectangle.entries()) {
    intervals[std::to_string(feature)] = {{"lo", BoundToJson(bound.lo())},
                                          {"hi", BoundToJson(bound.hi())}};
  }
  json j = json::object();
  if (rectangle.id()) j["id"] = *rectangle.id();
  j["intervals"] = intervals;
  return j;
}

absl::StatusOr<HyperRectangle> RectangleFromJson(const json& j) {
  if (!j.is_object() || !j.contains("intervals") ||
      !j["intervals"].is_object()) {
    return absl::InvalidArgumentError("rectangle needs an \"intervals\" object");
  }
  HyperRectangle out;
  if (j.contains("id") && j["id"].is_number_integer()) {
    out.set_id(j["id"].get<int64_t>());
  }
  for (const auto& [key, value] : j["intervals"].items()) {
    int feature = 0;
    if (!absl::SimpleAtoi(key, &feature) || feature < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad feature key \"", key, "\""));
    }
    if (!value.is_object() || !value.contains("lo") || !value.contains("hi")) {
      return absl::InvalidArgumentError(
          absl::StrCat("feature ", key, ": expected {lo, hi}"));
    }
    auto lo = BoundFromJson(value["lo"], true);
    if (!lo.ok()) return lo.status();
    auto hi = BoundFromJson(value["hi"], false);
    if (!hi.ok()) return hi.status();
    auto interval = Interval::Make(*lo, *hi);
    if (!interval) {
      return absl::InvalidArgumentError(
          absl::StrCat("feature ", key, ": empty interval"));
    }
    out.Restrict(feature, *interval);
  }
  return out;
}

json UnstableSetToJson(const UnstableSet& unstable) {
  json out = json::array();
  for (const HyperRectangle& h : unstable.rectangles) {
    out.push_back(RectangleToJson(h));
  }
  return out;
}

absl::StatusOr<UnstableSet> UnstableSetFromJson(std::string_view text,
                                                size_t num_features) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_array()) {
    return absl::InvalidArgumentError("expected a JSON array of rectangles");
  }
  std::vector<HyperRectangle> rectangles;
  for (size_t i = 0; i < j.size(); ++i) {
    auto h = RectangleFromJson(j[i]);
    if (!h.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("[", i, "]: ", h.status().message()));
    }
    for (const auto& entry : h->entries()) {
      if (static_cast<size_t>(entry.first) >= num_features) {
        return absl::InvalidArgumentError(
            absl::StrCat("[", i, "]: unknown feature ", entry.first));
      }
    }
    rectangles.push_back(*std::move(h));
  }
  return MakeUnstableSet(std::move(rectangles));
}

json ItemsetToJson(const Itemset& itemset) {
  json items = json::array();
  for (const Item& item : itemset.items()) {
    items.push_back({{"feature", item.feature},
                     {"op", item.op == ItemOp::kLe ? "le" : "gt"},
                     {"threshold", item.threshold}});
  }
  return {{"items", items}};
}

absl::StatusOr<Itemset> ItemsetFromJson(const json& j, size_t num_features) {
  if (!j.is_object() || !j.contains("items") || !j["items"].is_array()) {
    return absl::InvalidArgumentError("itemset needs an \"items\" array");
  }
  std::vector<Item> items;
  for (const json& i : j["items"]) {
    if (!i.is_object() || !i.contains("feature") || !i.contains("op") ||
        !i.contains("threshold") || !i["feature"].is_number_integer() ||
        !i["op"].is_string() || !i["threshold"].is_number()) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad item ", i.dump()));
    }
    const int64_t feature = i["feature"].get<int64_t>();
    if (feature < 0 || static_cast<size_t>(feature) >= num_features) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown feature ", feature));
    }
    const std::string op = i["op"].get<std::string>();
    if (op != "le" && op != "gt") {
      return absl::InvalidArgumentError(absl::StrCat("bad op \"", op, "\""));
    }
    items.push_back({static_cast<FeatureId>(feature),
                     op == "le" ? ItemOp::kLe : ItemOp::kGt,
                     i["threshold"].get<double>()});
  }
  auto itemset = Itemset::FromItems(std::move(items));
  if (!itemset) return absl::InvalidArgumentError("itemset is empty");
  return *std::move(itemset);
}

json FormulaFileToJson(const FormulaSet& formulas,
                       const std::vector<RenderedFormula>& rendered,
                       int64_t elapsed_ms) {
  json items = json::array();
  for (const Itemset& i : formulas.itemsets) items.push_back(ItemsetToJson(i));
  json texts = json::array();
  for (const RenderedFormula& r : rendered) texts.push_back(r.text);
  json counts = json::array();
  for (const IterationStats& s : formulas.per_iteration) {
    counts.push_back(s.added);
  }
  json out = {{"converged", formulas.converged},
              {"iterations", formulas.iterations},
              {"formulas", items},
              {"formula_iterations", formulas.found_at},
              {"rendered", texts},
              {"per_iteration_counts", counts},
              {"elapsed_ms", elapsed_ms}};
  if (formulas.resource_limit_hit) out["warning"] = formulas.warning;
  return out;
}

absl::StatusOr<FormulaFile> FormulaFileFromJson(std::string_view text,
                                                size_t num_features) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("formulas") ||
      !j["formulas"].is_array()) {
    return absl::InvalidArgumentError(
        "expected a synthesis output object with a \"formulas\" array");
  }
  FormulaFile out;
  for (size_t i = 0; i < j["formulas"].size(); ++i) {
    auto itemset = ItemsetFromJson(j["formulas"][i], num_features);
    if (!itemset.ok()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "formulas[", i, "]: ", itemset.status().message()));
    }
    out.formulas.push_back(*std::move(itemset));
  }
  if (j.contains("formula_iterations") && j["formula_iterations"].is_array() &&
      j["formula_iterations"].size() == out.formulas.size()) {
    out.found_at = j["formula_iterations"].get<std::vector<int>>();
  } else {
    out.found_at.assign(out.formulas.size(), 1);
  }
  if (j.contains("converged") && j["converged"].is_boolean()) {
    out.converged = j["converged"].get<bool>();
  }
  if (j.contains("iterations") && j["iterations"].is_number_integer()) {
    out.iterations = j["iterations"].get<int>();
  }
  return out;
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

absl::Status WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  }
  out << contents;
  if (!out) return absl::DataLossError(absl::StrCat("failed writing ", path));
  return absl::OkStatus();
}

}  // namespace fairsynth
