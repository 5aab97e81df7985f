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
#ifndef SCENIC_DIAGNOSTICS_HPP_
#define SCENIC_DIAGNOSTICS_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scenic/dataset.hpp"
#include "scenic/maxent.hpp"

namespace scenic {

inline constexpr double kDefaultOutlierThreshold = 10.0;

struct WeightDiagnostics {
  std::vector<double> relative_weights;  // N * w
  double min = 0.0;
  double max = 0.0;
  double q01 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q99 = 0.0;
  double ess = 0.0;
  double ess_ratio = 0.0;
  double entropy_ratio = 0.0;
  std::size_t outlier_count = 0;
  double threshold = kDefaultOutlierThreshold;
  std::vector<std::string> warnings;
};

// Tukey box: linear-interpolation quartiles, whiskers at the last datum within
// 1.5 IQR of the box.
struct BoxplotStats {
  std::string label;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::vector<double> outliers;
};

// Diagnostics straight from a weight vector on the simplex.
WeightDiagnostics DiagnoseWeights(std::span<const double> weights,
                                  double threshold = kDefaultOutlierThreshold);

// Throws UsageError unless the result converged.
WeightDiagnostics Diagnose(const SolverResult& result,
                           double threshold = kDefaultOutlierThreshold);

BoxplotStats ComputeBoxplot(std::span<const double> values, std::string label);

struct SpreadPoint {
  double multiple = 1.0;
  SolverStatus status = SolverStatus::kConverged;
  std::optional<BoxplotStats> boxplot;  // empty when infeasible
  std::string note;
};

// For every multiple m, weighted-mean(f) = m * mean(f) on all `features`,
// then a boxplot of the relative weights.
std::vector<SpreadPoint> SpreadCurve(const Dataset& ds,
                                     const std::vector<std::string>& features,
                                     const std::vector<double>& multiples,
                                     const SolverConfig& config = {});

}  // namespace scenic

#endif  // SCENIC_DIAGNOSTICS_HPP_
