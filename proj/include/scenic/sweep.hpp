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
#ifndef SCENIC_SWEEP_HPP_
#define SCENIC_SWEEP_HPP_

#include <optional>
#include <string>
#include <vector>

#include "scenic/diagnostics.hpp"
#include "scenic/estimate.hpp"

namespace scenic {

// A constraint whose target value is filled in from `grid`, read in the
// template's target mode.
struct SweepAxis {
  ConstraintSpec constraint_template;
  std::vector<double> grid;

  void Validate() const;
  ConstraintSpec Instantiate(double value) const;
};

struct SweepCell {
  std::vector<double> axis_values;
  std::optional<Summary> summary;  // empty when nothing converged
  double infeasible_fraction = 0.0;
  std::optional<BoxplotStats> boxplot;
  std::vector<double> values;
  std::string note;
};

// Cells are row-major: index = i_a * len(b) + i_b.
struct SweepResult {
  std::string metric;
  std::vector<SweepAxis> axes;
  std::vector<SweepCell> cells;
  std::size_t B = 0;

  const SweepCell& at(std::size_t i_a, std::size_t i_b = 0) const;
};

SweepResult Sweep1D(const Dataset& ds, const SweepAxis& axis,
                    const std::string& metric, const Scenario& base_scenario,
                    const ResamplePlan& plan, const SolverConfig& config);

SweepResult Sweep2D(const Dataset& ds, const SweepAxis& axis_a,
                    const SweepAxis& axis_b, const std::string& metric,
                    const ResamplePlan& plan, const SolverConfig& config,
                    const Scenario& base_scenario = {});

struct ContourPoint {
  double a = 0.0;
  double b = 0.0;
};

struct ExchangeRate {
  std::vector<ContourPoint> points;
  std::vector<std::string> warnings;
};

// Iso-contour of cell medians at `level`: for each a-row, the first crossing
// along b, linearly interpolated.
ExchangeRate ExchangeRateContour(const SweepResult& result, double level);

}  // namespace scenic

#endif  // SCENIC_SWEEP_HPP_
