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
#include "scenic/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "scenic/errors.hpp"
#include "scenic/estimate.hpp"
#include "scenic/scenario.hpp"

namespace scenic {

WeightDiagnostics DiagnoseWeights(std::span<const double> weights,
                                  double threshold) {
  if (weights.empty()) throw UsageError("no weights to diagnose");
  const double n = static_cast<double>(weights.size());
  WeightDiagnostics d;
  d.threshold = threshold;
  d.relative_weights.reserve(weights.size());
  double sq = 0.0;
  for (double w : weights) {
    d.relative_weights.push_back(n * w);
    sq += w * w;
    if (n * w > threshold) ++d.outlier_count;
  }
  std::vector<double> sorted = d.relative_weights;
  std::sort(sorted.begin(), sorted.end());
  d.min = sorted.front();
  d.max = sorted.back();
  d.q01 = Quantile(sorted, 0.01);
  d.q25 = Quantile(sorted, 0.25);
  d.q50 = Quantile(sorted, 0.50);
  d.q75 = Quantile(sorted, 0.75);
  d.q99 = Quantile(sorted, 0.99);
  d.ess = std::clamp(1.0 / sq, 1.0, n);
  d.ess_ratio = d.ess / n;
  d.entropy_ratio =
      weights.size() > 1 ? std::clamp(Entropy(weights) / std::log(n), 0.0, 1.0)
                         : 1.0;

  char buf[160];
  if (d.ess_ratio < 0.1) {
    std::snprintf(buf, sizeof(buf),
                  "effective sample size %.1f is %.2f%% of N; the estimate "
                  "rests on few observations",
                  d.ess, 100.0 * d.ess_ratio);
    d.warnings.emplace_back(buf);
  }
  if (d.outlier_count > 0) {
    std::snprintf(buf, sizeof(buf),
                  "%zu observation(s) carry relative weight above %g "
                  "(max %.3g)",
                  d.outlier_count, threshold, d.max);
    d.warnings.emplace_back(buf);
  }
  return d;
}

WeightDiagnostics Diagnose(const SolverResult& result, double threshold) {
  if (!result.converged()) {
    throw UsageError("cannot diagnose a " + ToString(result.status) +
                     " solver result");
  }
  WeightDiagnostics d = DiagnoseWeights(result.weights, threshold);
  d.warnings.insert(d.warnings.end(), result.warnings.begin(),
                    result.warnings.end());
  return d;
}

BoxplotStats ComputeBoxplot(std::span<const double> values, std::string label) {
  if (values.empty()) throw UsageError("boxplot of empty input");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  BoxplotStats box;
  box.label = std::move(label);
  box.q1 = Quantile(sorted, 0.25);
  box.median = Quantile(sorted, 0.5);
  box.q3 = Quantile(sorted, 0.75);
  const double iqr = box.q3 - box.q1;
  const double lo_fence = box.q1 - 1.5 * iqr;
  const double hi_fence = box.q3 + 1.5 * iqr;
  box.whisker_low = box.q1;
  box.whisker_high = box.q3;
  for (double v : sorted) {
    if (v < lo_fence || v > hi_fence) {
      box.outliers.push_back(v);
    } else {
      box.whisker_low = std::min(box.whisker_low, v);
      box.whisker_high = std::max(box.whisker_high, v);
    }
  }
  return box;
}

std::vector<SpreadPoint> SpreadCurve(const Dataset& ds,
                                     const std::vector<std::string>& features,
                                     const std::vector<double>& multiples,
                                     const SolverConfig& config) {
  if (features.empty()) throw UsageError("spread curve needs features");
  for (const auto& f : features) {
    if (ds.spec(f).kind != ColumnKind::kNumericFeature) {
      throw ScenarioError("spread curve feature '" + f + "' is not numeric");
    }
  }
  std::vector<SpreadPoint> out;
  for (double m : multiples) {
    if (!(m > 0.0)) throw UsageError("spread multiples must be positive");
    SpreadPoint point;
    point.multiple = m;
    Scenario scenario;
    for (const auto& f : features) {
      ConstraintSpec c;
      c.feature = f;
      c.statistic = Statistic::kWeightedMean;
      c.relation = Relation::kEq;
      c.target = {TargetMode::kMultipleOfBaseline, m};
      scenario.push_back(c);
    }
    char label[32];
    std::snprintf(label, sizeof(label), "x%.4g", m);
    try {
      const SolverResult res = Solve(Compile(scenario, ds), config);
      point.status = res.status;
      if (res.converged()) {
        point.boxplot =
            ComputeBoxplot(DiagnoseWeights(res.weights).relative_weights, label);
      } else {
        point.note = "solver " + ToString(res.status);
      }
    } catch (const InfeasibleScenario& e) {
      point.status = SolverStatus::kInfeasible;
      point.note = e.what();
    }
    out.push_back(std::move(point));
  }
  return out;
}

}  // namespace scenic
