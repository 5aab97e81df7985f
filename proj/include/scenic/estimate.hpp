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
#ifndef SCENIC_ESTIMATE_HPP_
#define SCENIC_ESTIMATE_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "scenic/dataset.hpp"
#include "scenic/maxent.hpp"
#include "scenic/scenario.hpp"

namespace scenic {

// Resamples with more than this share of failed solves get a warning.
inline constexpr double kFragilityThreshold = 0.05;

struct PointEstimate {
  std::string metric;
  double value = 0.0;
  double entropy = 0.0;
  double ess = 0.0;
  SolverStatus status = SolverStatus::kConverged;
};

struct Histogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::size_t> counts;
};

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;  // n - 1 denominator, 0 for a single value
  double q05 = 0.0;
  double q95 = 0.0;
  Histogram histogram;
};

struct BootstrapDistribution {
  std::string metric;
  std::vector<double> values;  // converged resamples, in resample order
  std::size_t B_requested = 0;
  double infeasible_fraction = 0.0;
  Summary summary;
  std::vector<std::string> warnings;
};

// Linear interpolation between order statistics at h = (n - 1) p.
double Quantile(std::span<const double> sorted_values, double p);

Summary Summarize(std::span<const double> values, std::size_t bins = 20);

// sum_n w_n t_n. Estimates are averages; there is deliberately no total.
PointEstimate EstimatePoint(std::span<const double> weights, const Dataset& ds,
                            const std::string& metric,
                            SolverStatus status = SolverStatus::kConverged);

// Solve once on the whole dataset and evaluate every metric.
std::vector<PointEstimate> EstimateScenario(const Dataset& ds,
                                            const Scenario& scenario,
                                            const std::vector<std::string>& metrics,
                                            const SolverConfig& config,
                                            SolverResult* solved = nullptr);

// Relative targets are resolved once against the full dataset, then every
// resample is compiled, solved and evaluated. Resamples whose compile or solve
// fails count toward infeasible_fraction. Results are in resample order
// whatever the thread count.
std::vector<BootstrapDistribution> BootstrapEstimates(
    const Dataset& ds, const Scenario& scenario,
    const std::vector<std::string>& metrics, const ResamplePlan& plan,
    const SolverConfig& config, std::size_t bins = 20);

BootstrapDistribution BootstrapEstimate(const Dataset& ds,
                                        const Scenario& scenario,
                                        const std::string& metric,
                                        const ResamplePlan& plan,
                                        const SolverConfig& config);

}  // namespace scenic

#endif  // SCENIC_ESTIMATE_HPP_
