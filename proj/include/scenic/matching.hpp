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
#ifndef SCENIC_MATCHING_HPP_
#define SCENIC_MATCHING_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scenic/dataset.hpp"

namespace scenic {

// Logistic regression of branch membership (treatment = 1) on standardized
// features.
struct PropensityModel {
  std::vector<std::string> features;
  std::vector<double> coefficients;  // standardized scale
  std::vector<double> std_errors;    // from the inverse Fisher information
  double intercept = 0.0;
  std::vector<std::pair<double, double>> standardization;  // (mean, sd)
  bool converged = false;
  bool separation = false;
  int iterations = 0;
  std::vector<std::string> warnings;

  double Score(std::span<const double> raw_features) const;
  std::vector<double> Scores(const Dataset& ds) const;
};

struct MatchResult {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (treat, control)
  std::vector<double> treatment_scores;  // per pair
  std::vector<double> control_scores;    // per pair
  std::size_t unmatched_treatment = 0;
  std::optional<double> caliper;
  double score_sd = 0.0;
  double estimate = 0.0;  // set by callers via MatchedEstimate
};

// Metric columns are dropped from `features`; an empty list means every
// feature column present in both tables.
PropensityModel FitPropensity(const Dataset& control, const Dataset& treatment,
                              const std::vector<std::string>& features);

// Treatment processed by descending score, ties to the lower row index; each
// takes the unused control with the nearest score, ties to the lower index.
// `caliper` is in units of the pooled score sd.
MatchResult GreedyMatchScores(std::span<const double> control_scores,
                              std::span<const double> treatment_scores,
                              std::optional<double> caliper = std::nullopt);

// Refuses non-converged models unless `accept_nonconverged` is set.
MatchResult GreedyMatch(const PropensityModel& model, const Dataset& control,
                        const Dataset& treatment,
                        std::optional<double> caliper = std::nullopt,
                        bool accept_nonconverged = false);

// Unweighted metric mean over matched control rows, summed in row order.
double MatchedEstimate(const MatchResult& result, const Dataset& control,
                       const std::string& metric);

}  // namespace scenic

#endif  // SCENIC_MATCHING_HPP_
