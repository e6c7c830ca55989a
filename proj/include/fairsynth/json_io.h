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

// JSON encodings of rectangles, itemsets and synthesis results.

#ifndef FAIRSYNTH_JSON_IO_H_
#define FAIRSYNTH_JSON_IO_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "fairsynth/itemsets.h"
#include "fairsynth/model.h"
#include "fairsynth/render.h"
#include "fairsynth/stability.h"
#include "fairsynth/synthesis.h"
#include "json.hpp"

namespace fairsynth {

// {"id": int, "intervals": {"<feature>": {"lo": number|"-inf",
//                                        "hi": number|"+inf"}}}
nlohmann::json RectangleToJson(const HyperRectangle& rectangle);
absl::StatusOr<HyperRectangle> RectangleFromJson(const nlohmann::json& j);

nlohmann::json UnstableSetToJson(const UnstableSet& unstable);
// Accepts a JSON array of rectangles; ids are reassigned densely in order.
absl::StatusOr<UnstableSet> UnstableSetFromJson(std::string_view text,
                                                size_t num_features);

// {"items": [{"feature": int, "op": "le"|"gt", "threshold": number}]}
nlohmann::json ItemsetToJson(const Itemset& itemset);
absl::StatusOr<Itemset> ItemsetFromJson(const nlohmann::json& j,
                                        size_t num_features);

// The synthesis output file. "elapsed_ms" is the only field that varies
// between identical runs.
nlohmann::json FormulaFileToJson(const FormulaSet& formulas,
                                 const std::vector<RenderedFormula>& rendered,
                                 int64_t elapsed_ms);

// The parts of a synthesis output file needed downstream.
struct FormulaFile {
  std::vector<Itemset> formulas;
  std::vector<int> found_at;
  bool converged = false;
  int iterations = 0;
};
absl::StatusOr<FormulaFile> FormulaFileFromJson(std::string_view text,
                                                size_t num_features);

absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, std::string_view contents);

}  // namespace fairsynth

#endif  // FAIRSYNTH_JSON_IO_H_
