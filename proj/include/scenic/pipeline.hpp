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
// End-to-end operations shared by the command-line tool, the HTTP service and
// the Python bindings, so all three produce the same numbers and documents.
#ifndef SCENIC_PIPELINE_HPP_
#define SCENIC_PIPELINE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "scenic/report.hpp"

namespace scenic {

// Per-column statistics plus the dataset digest.
Json DescribeDataset(const Dataset& ds);

// Axis i sweeps the i-th template constraint over grids[i]; template target
// values are ignored.
std::vector<SweepAxis> MakeAxes(const Scenario& templates,
                                const std::vector<std::vector<double>>& grids);

// Throws InfeasibleScenario on range violations and dual divergence. A
// max-iters result is returned with its status so callers can decide.
Json RunSolve(const Dataset& ds, const Scenario& scenario,
              const std::vector<std::string>& metrics,
              const SolverConfig& config, double threshold,
              SolverResult* solved = nullptr);

Json RunBootstrap(const Dataset& ds, const Scenario& scenario,
                  const std::vector<std::string>& metrics,
                  const ResamplePlan& plan, const SolverConfig& config,
                  std::vector<BootstrapDistribution>* dists = nullptr);

Json RunDiagnose(const Dataset& ds, const Scenario& scenario,
                 const SolverConfig& config, double threshold,
                 const std::vector<std::string>& spread_features = {},
                 const std::vector<double>& multiples = {},
                 std::vector<SpreadPoint>* spread = nullptr);

// One or two axes; `level` adds an exchange-rate contour for 2-D sweeps.
Json RunSweep(const Dataset& ds, const std::vector<SweepAxis>& axes,
              const std::string& metric, const Scenario& base,
              const ResamplePlan& plan, const SolverConfig& config,
              std::optional<double> level = std::nullopt,
              SweepResult* result = nullptr);

Json RunMatch(const Dataset& control, const Dataset& treatment,
              const std::vector<std::string>& features,
              const std::string& metric, std::optional<double> caliper,
              bool accept_nonconverged = false, MatchResult* result = nullptr);

// --- Criteo reproduction ----------------------------------------------------

struct CriteoOptions {
  std::vector<std::string> features = {"f1", "f4", "f7", "f10"};
  std::vector<double> targets = {17.00, 3.59, -5.43, 23.34};
  std::string metric = "visit";
  std::string treatment_column = "treatment";
  std::size_t B = 199;
  std::size_t m = 10000;
  std::uint64_t seed = 7;
  // Control rows used to fit and run the propensity match. The treatment
  // subsample is match_rows / match_pool_ratio so 1:1 matching without
  // replacement still has controls to choose from.
  std::size_t match_rows = 200000;
  std::size_t match_pool_ratio = 4;
};

struct CriteoReport {
  std::size_t n_control = 0;
  std::size_t n_treatment = 0;
  BootstrapDistribution control;
  BootstrapDistribution treatment;
  BootstrapDistribution scenario;
  BootstrapDistribution matching;
  bool prediction_below_control = false;
  bool prediction_above_treatment = false;
  bool matching_between = false;  // between scenario and treatment means
  Json document;
};

// `ds` holds both branches, split on the treatment indicator.
CriteoReport CriteoRepro(const Dataset& ds, const CriteoOptions& options);

}  // namespace scenic

#endif  // SCENIC_PIPELINE_HPP_
