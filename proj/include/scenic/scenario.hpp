/*
 * Copyright 2026 The Scenic Authors.
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
#ifndef SCENIC_SCENARIO_HPP_
#define SCENIC_SCENARIO_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scenic/dataset.hpp"

namespace scenic {

enum class TargetMode { kAbsolute, kMultipleOfBaseline, kLiftPercent };
enum class Statistic {
  kWeightedMean,
  kWeightedProportion,
  kConditionalMean,
  kCountMultiplier
};
enum class Relation { kEq, kLe, kGe };

std::string ToString(TargetMode mode);
std::string ToString(Statistic statistic);
std::string ToString(Relation relation);

struct TargetSpec {
  TargetMode mode = TargetMode::kAbsolute;
  double value = 0.0;
};

// One declared change to the population. Constraints are always read over
// normalized weights, i.e. as weighted means.
struct ConstraintSpec {
  std::optional<std::string> label;
  std::string feature;
  std::optional<std::string> condition;
  Statistic statistic = Statistic::kWeightedMean;
  Relation relation = Relation::kEq;
  TargetSpec target;

  // Explicit label, or a generated one such as "mean(age | is_male) eq 65".
  std::string DisplayLabel() const;
};

using Scenario = std::vector<ConstraintSpec>;

// K linear rows over observation weights: sum_n w_n rows[k][n] {=,<=,>=}
// targets[k].
struct CompiledConstraints {
  std::size_t n_observations = 0;
  std::vector<std::vector<double>> rows;
  std::vector<double> targets;
  std::vector<Relation> relations;
  std::vector<std::string> labels;

  std::size_t size() const { return rows.size(); }
  std::size_t n_rows() const {
    return n_observations ? n_observations
                          : (rows.empty() ? 0 : rows.front().size());
  }
  bool empty() const { return rows.empty(); }
};

// Strict JSON parsing: unknown fields are rejected, errors carry a path such
// as `constraints[1].relation`.
Scenario ParseScenario(std::string_view json_text);
Scenario LoadScenario(const std::string& path);
std::string ScenarioToJson(const Scenario& scenario);

// Share of a subgroup after its count is multiplied by `gamma` while every
// other row keeps its count.
double CountMultiplierToProportion(double gamma, double baseline_proportion);

// Unweighted baseline statistic a constraint is measured against.
double BaselineStatistic(const ConstraintSpec& spec, const Dataset& ds);

// Rewrites every target as an absolute value resolved against `ds`.
// Count multipliers become weighted proportions.
Scenario ResolveTargets(const Scenario& scenario, const Dataset& ds);

// Throws ScenarioError for unknown columns, wrong kinds and empty condition
// subsets; InfeasibleScenario when a target lies outside the range a single
// row can reach.
CompiledConstraints Compile(const Scenario& scenario, const Dataset& ds);

}  // namespace scenic

#endif  // SCENIC_SCENARIO_HPP_
