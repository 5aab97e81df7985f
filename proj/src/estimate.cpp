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
#include "scenic/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

#include "parallel.hpp"
#include "scenic/errors.hpp"

namespace scenic {

double Quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw UsageError("quantile of empty input");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Summary Summarize(std::span<const double> values, std::size_t bins) {
  if (values.empty()) throw UsageError("cannot summarize an empty list");
  if (bins < 1) throw UsageError("histogram needs at least one bin");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  Summary s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = sorted.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.median = Quantile(sorted, 0.5);
  s.q05 = Quantile(sorted, 0.05);
  s.q95 = Quantile(sorted, 0.95);

  const double lo = sorted.front();
  const double hi = sorted.back();
  const double width = (hi - lo) / static_cast<double>(bins);
  s.histogram.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) {
    s.histogram.edges[b] = lo + width * static_cast<double>(b);
  }
  s.histogram.edges[bins] = hi;
  s.histogram.counts.assign(bins, 0);
  for (double v : sorted) {
    std::size_t b = 0;
    if (width > 0.0) {
      b = std::min(bins - 1, static_cast<std::size_t>((v - lo) / width));
    }
    ++s.histogram.counts[b];
  }
  return s;
}

PointEstimate EstimatePoint(std::span<const double> weights, const Dataset& ds,
                            const std::string& metric, SolverStatus status) {
  if (!ds.has_column(metric)) {
    throw DataError("unknown metric '" + metric + "'");
  }
  if (weights.size() != ds.n_rows()) {
    throw UsageError("weight vector length does not match the dataset");
  }
  const auto t = ds.column(metric);
  PointEstimate est;
  est.metric = metric;
  est.status = status;
  double value = 0.0, sq = 0.0;
  for (std::size_t r = 0; r < t.size(); ++r) {
    value += weights[r] * t[r];
    sq += weights[r] * weights[r];
  }
  est.value = value;
  est.ess = 1.0 / sq;
  est.entropy = Entropy(weights);
  return est;
}

namespace {

void CheckMetrics(const Dataset& ds, const std::vector<std::string>& metrics) {
  if (metrics.empty()) throw UsageError("no metric requested");
  for (const auto& m : metrics) {
    if (!ds.has_column(m)) throw DataError("unknown metric '" + m + "'");
  }
}

}  // namespace

std::vector<PointEstimate> EstimateScenario(const Dataset& ds,
                                            const Scenario& scenario,
                                            const std::vector<std::string>& metrics,
                                            const SolverConfig& config,
                                            SolverResult* solved) {
  CheckMetrics(ds, metrics);
  SolverResult result = Solve(Compile(scenario, ds), config);
  std::vector<PointEstimate> out;
  for (const auto& m : metrics) {
    out.push_back(EstimatePoint(result.weights, ds, m, result.status));
  }
  if (solved) *solved = std::move(result);
  return out;
}

std::vector<BootstrapDistribution> BootstrapEstimates(
    const Dataset& ds, const Scenario& scenario,
    const std::vector<std::string>& metrics, const ResamplePlan& plan,
    const SolverConfig& config, std::size_t bins) {
  CheckMetrics(ds, metrics);
  plan.Validate(ds.n_rows());
  config.Validate();
  // Fixed absolute targets for every resample; also surfaces range errors on
  // the full data before any resampling.
  const Scenario resolved = ResolveTargets(scenario, ds);
  Compile(resolved, ds);

  struct Outcome {
    std::optional<std::vector<double>> values;
    std::optional<InfeasibilityReport> report;
  };
  std::vector<Outcome> outcomes(plan.B);
  internal::ParallelFor(plan.B, [&](std::size_t i) {
    const Dataset sample = Resample(ds, plan, i);
    Outcome& out = outcomes[i];
    SolverResult result;
    try {
      result = Solve(Compile(resolved, sample), config);
    } catch (const InfeasibleScenario& e) {
      out.report = e.report();
      return;
    } catch (const ScenarioError&) {
      return;  // e.g. a condition subset absent from this resample
    }
    if (!result.converged()) {
      out.report = result.infeasibility;
      return;
    }
    std::vector<double> vals;
    for (const auto& m : metrics) {
      vals.push_back(EstimatePoint(result.weights, sample, m).value);
    }
    out.values = std::move(vals);
  });

  std::size_t failed = 0;
  std::optional<InfeasibilityReport> last_report;
  for (const auto& o : outcomes) {
    if (!o.values) {
      ++failed;
      if (o.report) last_report = o.report;
    }
  }
  if (failed == plan.B) {
    InfeasibilityReport report = last_report.value_or(InfeasibilityReport{});
    report.detail = "all " + std::to_string(plan.B) +
                    " resamples failed to produce converged weights";
    throw InfeasibleScenario(report);
  }

  std::vector<BootstrapDistribution> dists(metrics.size());
  for (std::size_t j = 0; j < metrics.size(); ++j) {
    auto& d = dists[j];
    d.metric = metrics[j];
    d.B_requested = plan.B;
    d.infeasible_fraction =
        static_cast<double>(failed) / static_cast<double>(plan.B);
    for (const auto& o : outcomes) {
      if (o.values) d.values.push_back((*o.values)[j]);
    }
    d.summary = Summarize(d.values, bins);
    if (d.infeasible_fraction > kFragilityThreshold) {
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "%.1f%% of resamples had no feasible weights; the scenario "
                    "is fragile",
                    100.0 * d.infeasible_fraction);
      d.warnings.emplace_back(buf);
    }
  }
  return dists;
}

BootstrapDistribution BootstrapEstimate(const Dataset& ds,
                                        const Scenario& scenario,
                                        const std::string& metric,
                                        const ResamplePlan& plan,
                                        const SolverConfig& config) {
  return BootstrapEstimates(ds, scenario, {metric}, plan, config).front();
}

}  // namespace scenic
