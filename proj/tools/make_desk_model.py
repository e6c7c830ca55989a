# Copyright 2026 The Fairsynth Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes tests/data/desk_model.json, the desk-scale benchmark model.

A 13-tree, depth-6 random forest trained on synthetic census-like data with
20 features: a binary "sex", 8 numeric columns normalized to [0, 1] (mostly
small integer ranges, as in census extracts) and three one-hot groups.
Rerunning with the same scikit-learn version reproduces the file.
"""

import argparse
import json

import numpy as np
from sklearn.ensemble import RandomForestClassifier

NUMERIC = ["age", "education_num", "hours_per_week", "capital_gain",
           "capital_loss", "fnlwgt", "tenure", "dependents"]
GROUPS = {
    "workclass": ["private", "self_emp", "government", "other"],
    "marital": ["married", "single", "divorced"],
    "relationship": ["husband", "wife", "own_child", "unmarried"],
}


def make_data(rng, n, sex_weight):
  # Census-like columns: mostly small integer ranges and sparse amounts,
  # normalized to [0, 1]; only fnlwgt is continuous (and uninformative).
  def scaled(v, lo, hi):
    return (v - lo) / (hi - lo)

  cols = {"sex": rng.integers(0, 2, n).astype(float)}
  cols["age"] = scaled(np.clip(rng.normal(38, 13, n).round(), 17, 90), 17, 90)
  cols["education_num"] = scaled(rng.integers(1, 17, n), 1, 16)
  cols["hours_per_week"] = scaled(
      np.where(rng.random(n) < 0.5, 40,
               np.clip(rng.normal(40, 12, n).round(), 1, 99)), 1, 99)
  gains = rng.choice(np.arange(1, 41) * 2500, n)
  cols["capital_gain"] = scaled(np.where(rng.random(n) < 0.92, 0, gains),
                                0, 100000)
  losses = rng.choice(np.arange(1, 21) * 200, n)
  cols["capital_loss"] = scaled(np.where(rng.random(n) < 0.95, 0, losses),
                                0, 4000)
  cols["fnlwgt"] = rng.random(n)
  cols["tenure"] = scaled(rng.integers(0, 41, n), 0, 40)
  cols["dependents"] = scaled(rng.integers(0, 7, n), 0, 6)
  picks = {g: rng.integers(0, len(v), n) for g, v in GROUPS.items()}
  # As in census data, relationship carries most of the sex signal: married
  # men are husbands and married women are wives.
  married = picks["marital"] == 0
  picks["relationship"] = np.where(
      married, np.where(cols["sex"] == 1, 0, 1),
      rng.choice([2, 3], n))
  for group, values in GROUPS.items():
    for i, v in enumerate(values):
      cols[f"{group}_{v}"] = (picks[group] == i).astype(float)
  score = (2.5 * cols["education_num"] + 2.0 * cols["age"] +
           1.5 * cols["hours_per_week"] + 6.0 * cols["capital_gain"] -
           1.0 * cols["capital_loss"] + sex_weight * cols["sex"] +
           1.2 * (picks["relationship"] == 0) +
           0.8 * (picks["relationship"] == 1) - 0.5 * (picks["workclass"] == 3) -
           2.9 + rng.normal(0, 0.6, n))
  names = list(cols)
  x = np.column_stack([cols[c] for c in names])
  return names, x, (score > 0).astype(int)


def export_tree(tree):
  t = tree.tree_

  def node(i):
    if t.children_left[i] == -1:
      return {"leaf": int(np.argmax(t.value[i][0]))}
    return {"feature": int(t.feature[i]), "threshold": float(t.threshold[i]),
            "left": node(t.children_left[i]),
            "right": node(t.children_right[i])}

  return node(0)


def main():
  parser = argparse.ArgumentParser(description=__doc__)
  parser.add_argument("--out", default="tests/data/desk_model.json")
  parser.add_argument("--seed", type=int, default=7)
  parser.add_argument("--sex-weight", type=float, default=0.15,
                      help="direct effect of sex on the label score")
  args = parser.parse_args()

  rng = np.random.default_rng(args.seed)
  names, x, y = make_data(rng, 20000, args.sex_weight)
  forest = RandomForestClassifier(n_estimators=13, max_depth=6,
                                  random_state=args.seed).fit(x, y)
  features = []
  for i, name in enumerate(names):
    group = next((g for g in GROUPS if name.startswith(g + "_")), None)
    kind = "onehot" if group else ("binary" if name == "sex" else "numeric")
    features.append({"id": i, "name": name, "kind": kind, "group": group})
  model = {"num_features": len(names), "labels": ["<=50K", ">50K"],
           "features": features,
           "trees": [export_tree(e) for e in forest.estimators_]}
  with open(args.out, "w") as f:
    json.dump(model, f, indent=1)
    f.write("\n")
  print(f"{args.out}: {len(names)} features, accuracy "
        f"{forest.score(x, y):.3f}")


if __name__ == "__main__":
  main()
