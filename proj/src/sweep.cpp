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
#include "scenic/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <algorithm>

#include "scenic/errors.hpp"

namespace scenic {

void SweepAxis::Validate() const {
  if (grid.empty()) throw UsageError("sweep grid is empty");
  for (double v : grid) {
    if (!std::isfinite(v)) throw UsageError("sweep grid has a non-finite value");
  }
  if (grid.size() > 1) {
    const bool up = grid[1] > grid[0];
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (up ? !(grid[i] > grid[i - 1]) : !(grid[i] < grid[i - 1])) {
        throw UsageError("sweep grid must be strictly monotone");
      }
    }
  }
}

ConstraintSpec SweepAxis::Instantiate(double value) const {
  ConstraintSpec c = constraint_template;
  c.target.value = value;
  return c;
}

const SweepCell& SweepResult::at(std::size_t i_a, std::size_t i_b) const {
  const std::size_t nb = axes.size() > 1 ? axes[1].grid.size() : 1;
  if (i_a >= axes.at(0).grid.size() || i_b >= nb) {
    throw UsageError("sweep cell index out of range");
  }
  return cells[i_a * nb + i_b];
}

namespace {

std::string CellLabel(const std::vector<double>& values) {
  std::string out;
  char buf[32];
  for (double v : values) {
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    if (!out.empty()) out += ",";
    out += buf;
  }
  return out;
}

SweepCell RunCell(const Dataset& ds, Scenario scenario,
                  std::vector<double> axis_values, const std::string& metric,
                  const ResamplePlan& plan, const SolverConfig& config) {
  SweepCell cell;
  cell.axis_values = std::move(axis_values);
  try {
    BootstrapDistribution dist =
        BootstrapEstimate(ds, scenario, metric, plan, config);
    cell.infeasible_fraction = dist.infeasible_fraction;
    cell.summary = dist.summary;
    cell.boxplot = ComputeBoxplot(dist.values, CellLabel(cell.axis_values));
    cell.values = std::move(dist.values);
    if (!dist.warnings.empty()) cell.note = dist.warnings.front();
  } catch (const InfeasibleScenario& e) {
    cell.infeasible_fraction = 1.0;
    cell.note = e.what();
  }
  return cell;
}

void CheckSweep(const Dataset& ds, const std::string& metric,
                const ResamplePlan& plan) {
  if (!ds.has_column(metric)) throw DataError("unknown metric '" + metric + "'");
  plan.Validate(ds.n_rows());
}

}  // namespace

SweepResult Sweep1D(const Dataset& ds, const SweepAxis& axis,
                    const std::string& metric, const Scenario& base_scenario,
                    const ResamplePlan& plan, const SolverConfig& config) {
  axis.Validate();
  CheckSweep(ds, metric, plan);
  SweepResult out;
  out.metric = metric;
  out.axes = {axis};
  out.B = plan.B;
  // Every cell reuses plan.seed, so cells see identical resamples.
  for (double v : axis.grid) {
    Scenario s = base_scenario;
    s.push_back(axis.Instantiate(v));
    out.cells.push_back(RunCell(ds, std::move(s), {v}, metric, plan, config));
  }
  return out;
}

SweepResult Sweep2D(const Dataset& ds, const SweepAxis& axis_a,
                    const SweepAxis& axis_b, const std::string& metric,
                    const ResamplePlan& plan, const SolverConfig& config,
                    const Scenario& base_scenario) {
  axis_a.Validate();
  axis_b.Validate();
  CheckSweep(ds, metric, plan);
  SweepResult out;
  out.metric = metric;
  out.axes = {axis_a, axis_b};
  out.B = plan.B;
  for (double a : axis_a.grid) {
    for (double b : axis_b.grid) {
      Scenario s = base_scenario;
      s.push_back(axis_a.Instantiate(a));
      s.push_back(axis_b.Instantiate(b));
      out.cells.push_back(RunCell(ds, std::move(s), {a, b}, metric, plan, config));
    }
  }
  return out;
}

ExchangeRate ExchangeRateContour(const SweepResult& result, double level) {
  if (result.axes.size() != 2) {
    throw UsageError("exchange rate needs a 2-D sweep");
  }
  if (!std::isfinite(level)) throw UsageError("contour level must be finite");
  const auto& ga = result.axes[0].grid;
  const auto& gb = result.axes[1].grid;
  ExchangeRate out;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& c : result.cells) {
    if (!c.summary) continue;
    lo = std::min(lo, c.summary->median);
    hi = std::max(hi, c.summary->median);
  }
  if (!(level >= lo && level <= hi)) {
    out.warnings.push_back("level lies outside the range of cell medians");
    return out;
  }

  for (std::size_t i = 0; i < ga.size(); ++i) {
    for (std::size_t j = 0; j < gb.size(); ++j) {
      const auto& c0 = result.at(i, j);
      if (!c0.summary) continue;
      const double m0 = c0.summary->median;
      if (m0 == level) {
        out.points.push_back({ga[i], gb[j]});
        break;
      }
      if (j + 1 == gb.size()) break;
      const auto& c1 = result.at(i, j + 1);
      if (!c1.summary) continue;
      const double m1 = c1.summary->median;
      if ((m0 - level) * (m1 - level) < 0.0) {
        const double t = (level - m0) / (m1 - m0);
        out.points.push_back({ga[i], gb[j] + t * (gb[j + 1] - gb[j])});
        break;
      }
    }
  }
  if (out.points.empty()) {
    out.warnings.push_back("no grid row crosses the level");
  }
  return out;
}

}  // namespace scenic
