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
#include "scenic/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "scenic/errors.hpp"

namespace scenic {

namespace {

Json PlanJson(const ResamplePlan& plan) {
  return Json{{"mode", plan.mode == ResampleMode::kBootstrap ? "bootstrap" : "disjoint-subsets"},
              {"B", plan.B},
              {"m", plan.m},
              {"seed", plan.seed}};
}

Json Baselines(const Dataset& ds, const std::vector<std::string>& metrics) {
  Json out = Json::object();
  for (const auto& [name, mean] : ColumnMeans(ds, metrics)) out[name] = mean;
  return out;
}

}  // namespace

Json DescribeDataset(const Dataset& ds) {
  Json cols = Json::array();
  for (const auto& spec : ds.specs()) {
    const auto v = ds.column(spec.name);
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = v.empty() ? 0.0 : sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    Json c{{"name", spec.name}, {"kind", ToString(spec.kind)}};
    if (!spec.units.empty()) c["units"] = spec.units;
    c["mean"] = mean;
    c["sd"] = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    c["min"] = v.empty() ? 0.0 : *lo;
    c["max"] = v.empty() ? 0.0 : *hi;
    cols.push_back(std::move(c));
  }
  return Json{{"digest", HexDigest(ds.digest())},
              {"n_rows", ds.n_rows()},
              {"columns", cols}};
}

std::vector<SweepAxis> MakeAxes(const Scenario& templates,
                                const std::vector<std::vector<double>>& grids) {
  if (grids.empty() || grids.size() > 2) {
    throw UsageError("a sweep takes one or two grids");
  }
  if (templates.size() < grids.size()) {
    throw UsageError("need one template constraint per sweep axis");
  }
  std::vector<SweepAxis> axes;
  for (std::size_t i = 0; i < grids.size(); ++i) {
    SweepAxis axis{templates[i], grids[i]};
    axis.Validate();
    axes.push_back(std::move(axis));
  }
  return axes;
}

Json RunSolve(const Dataset& ds, const Scenario& scenario,
              const std::vector<std::string>& metrics,
              const SolverConfig& config, double threshold,
              SolverResult* solved) {
  SolverResult result;
  const auto estimates = EstimateScenario(ds, scenario, metrics, config, &result);
  if (result.status == SolverStatus::kInfeasible) {
    throw InfeasibleScenario(*result.infeasibility);
  }
  Json doc{{"provenance", ToJson(MakeProvenance(ds, scenario, 0))},
           {"status", ToString(result.status)},
           {"n_rows", ds.n_rows()}};
  Json est = Json::array();
  for (const auto& e : estimates) est.push_back(ToJson(e));
  doc["estimates"] = est;
  doc["baseline"] = Baselines(ds, metrics);
  doc["solver"] = ToJson(result);
  if (result.converged()) {
    doc["diagnostics"] = ToJson(Diagnose(result, threshold), true);
  }
  if (solved) *solved = std::move(result);
  return doc;
}

Json RunBootstrap(const Dataset& ds, const Scenario& scenario,
                  const std::vector<std::string>& metrics,
                  const ResamplePlan& plan, const SolverConfig& config,
                  std::vector<BootstrapDistribution>* dists) {
  auto out = BootstrapEstimates(ds, scenario, metrics, plan, config);
  Json list = Json::array();
  for (const auto& d : out) list.push_back(ToJson(d));
  Json doc{{"provenance", ToJson(MakeProvenance(ds, scenario, plan.seed))},
           {"plan", PlanJson(plan)},
           {"baseline", Baselines(ds, metrics)},
           {"distributions", list}};
  if (dists) *dists = std::move(out);
  return doc;
}

Json RunDiagnose(const Dataset& ds, const Scenario& scenario,
                 const SolverConfig& config, double threshold,
                 const std::vector<std::string>& spread_features,
                 const std::vector<double>& multiples,
                 std::vector<SpreadPoint>* spread_out) {
  const SolverResult result = Solve(Compile(scenario, ds), config);
  if (result.status == SolverStatus::kInfeasible) {
    throw InfeasibleScenario(*result.infeasibility);
  }
  Json doc{{"provenance", ToJson(MakeProvenance(ds, scenario, 0))},
           {"status", ToString(result.status)}};
  if (result.converged()) doc["diagnostics"] = ToJson(Diagnose(result, threshold));
  if (!spread_features.empty()) {
    auto points = SpreadCurve(ds, spread_features, multiples, config);
    Json spread = Json::array();
    for (const auto& p : points) spread.push_back(ToJson(p));
    doc["spread"] = spread;
    if (spread_out) *spread_out = std::move(points);
  }
  return doc;
}

Json RunSweep(const Dataset& ds, const std::vector<SweepAxis>& axes,
              const std::string& metric, const Scenario& base,
              const ResamplePlan& plan, const SolverConfig& config,
              std::optional<double> level, SweepResult* result) {
  if (axes.empty() || axes.size() > 2) {
    throw UsageError("a sweep takes one or two axes");
  }
  SweepResult r = axes.size() == 1
                      ? Sweep1D(ds, axes[0], metric, base, plan, config)
                      : Sweep2D(ds, axes[0], axes[1], metric, plan, config, base);
  Scenario all = base;
  for (const auto& a : axes) all.push_back(a.constraint_template);
  Json doc{{"provenance", ToJson(MakeProvenance(ds, all, plan.seed))},
           {"plan", PlanJson(plan)},
           {"baseline", ColumnMeans(ds, {metric}).at(metric)},
           {"sweep", ToJson(r)}};
  if (level) {
    if (axes.size() != 2) throw UsageError("exchange rates need two axes");
    doc["exchange_rate"] = ToJson(ExchangeRateContour(r, *level));
    doc["exchange_rate"]["level"] = *level;
  }
  if (result) *result = std::move(r);
  return doc;
}

Json RunMatch(const Dataset& control, const Dataset& treatment,
              const std::vector<std::string>& features,
              const std::string& metric, std::optional<double> caliper,
              bool accept_nonconverged, MatchResult* result) {
  if (!control.has_column(metric) || !treatment.has_column(metric)) {
    throw DataError("metric '" + metric + "' missing from one of the branches");
  }
  const PropensityModel model = FitPropensity(control, treatment, features);
  MatchResult m = GreedyMatch(model, control, treatment, caliper, accept_nonconverged);
  m.estimate = MatchedEstimate(m, control, metric);
  Json doc{{"provenance",
            Json{{"control_digest", HexDigest(control.digest())},
                 {"treatment_digest", HexDigest(treatment.digest())},
                 {"seed", 0}}},
           {"metric", metric},
           {"model", ToJson(model)},
           {"match", ToJson(m, true)},
           {"estimate", m.estimate},
           {"control_mean", ColumnMeans(control, {metric}).at(metric)},
           {"treatment_mean", ColumnMeans(treatment, {metric}).at(metric)}};
  if (result) *result = std::move(m);
  return doc;
}

namespace {

// Seeded subsample of at most k rows, kept in source order.
Dataset Subsample(const Dataset& ds, std::size_t k, std::uint64_t seed) {
  if (ds.n_rows() <= k) return ds;
  std::vector<std::size_t> idx(ds.n_rows());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return ds.take(idx);
}

BootstrapDistribution Pane(BootstrapDistribution d, const std::string& name) {
  d.metric = name;
  return d;
}

}  // namespace

CriteoReport CriteoRepro(const Dataset& ds, const CriteoOptions& options) {
  if (options.features.size() != options.targets.size()) {
    throw UsageError("one target per constrained feature");
  }
  if (!ds.has_column(options.treatment_column)) {
    throw DataError("missing treatment column '" + options.treatment_column + "'");
  }
  for (const auto& f : options.features) {
    if (!ds.has_column(f)) throw DataError("missing column '" + f + "'");
  }
  if (!ds.has_column(options.metric)) {
    throw DataError("missing metric column '" + options.metric + "'");
  }
  const Dataset control = ds.filter(options.treatment_column, 0.0);
  const Dataset treatment = ds.filter(options.treatment_column, 1.0);
  const ResamplePlan plan{ResampleMode::kBootstrap, options.B, options.m, options.seed};
  const SolverConfig config;

  Scenario scenario;
  for (std::size_t i = 0; i < options.features.size(); ++i) {
    ConstraintSpec c;
    c.feature = options.features[i];
    c.target = {TargetMode::kAbsolute, options.targets[i]};
    scenario.push_back(c);
  }

  CriteoReport rep;
  rep.n_control = control.n_rows();
  rep.n_treatment = treatment.n_rows();
  rep.control = Pane(BootstrapEstimate(control, {}, options.metric, plan, config),
                     "control");
  rep.treatment = Pane(
      BootstrapEstimate(treatment, {}, options.metric, plan, config), "treatment");
  rep.scenario = Pane(
      BootstrapEstimate(control, scenario, options.metric, plan, config), "scenario");

  // One match on seeded subsamples, then a bootstrap of the matched controls.
  const Dataset mc = Subsample(control, options.match_rows, DeriveSeed(options.seed, 100));
  if (options.match_pool_ratio < 1) throw UsageError("match_pool_ratio must be >= 1");
  const Dataset mt = Subsample(
      treatment, std::max<std::size_t>(1, mc.n_rows() / options.match_pool_ratio),
      DeriveSeed(options.seed, 101));
  std::vector<std::string> match_features;
  for (const auto& name : mc.feature_names()) {
    if (name != options.treatment_column) match_features.push_back(name);
  }
  const PropensityModel model = FitPropensity(mc, mt, match_features);
  MatchResult match = GreedyMatch(model, mc, mt, std::nullopt, true);
  match.estimate = MatchedEstimate(match, mc, options.metric);
  std::vector<std::size_t> rows;
  for (const auto& [_, c] : match.pairs) rows.push_back(c);
  std::sort(rows.begin(), rows.end());
  rep.matching = Pane(
      BootstrapEstimate(mc.take(rows), {}, options.metric, plan, config), "matching");

  const double c_mean = rep.control.summary.mean;
  const double t_mean = rep.treatment.summary.mean;
  const double s_mean = rep.scenario.summary.mean;
  const double m_mean = rep.matching.summary.mean;
  rep.prediction_below_control = s_mean < c_mean;
  rep.prediction_above_treatment = s_mean > t_mean;
  rep.matching_between = std::min(s_mean, t_mean) < m_mean && m_mean < std::max(s_mean, t_mean);

  Json panes = Json::array();
  for (const auto* d : {&rep.control, &rep.scenario, &rep.matching, &rep.treatment}) {
    panes.push_back(ToJson(*d));
  }
  rep.document = Json{
      {"provenance", ToJson(MakeProvenance(ds, scenario, options.seed))},
      {"plan", PlanJson(plan)},
      {"n_control", rep.n_control},
      {"n_treatment", rep.n_treatment},
      {"metric", options.metric},
      {"scenario", Json::parse(ScenarioToJson(scenario))},
      {"match_rows", Json{{"control", mc.n_rows()}, {"treatment", mt.n_rows()}}},
      {"matching_model", ToJson(model)},
      {"matching", ToJson(match)},
      {"panes", panes},
      {"flags",
       Json{{"prediction_below_control", rep.prediction_below_control},
            {"prediction_above_treatment", rep.prediction_above_treatment},
            {"matching_between_prediction_and_treatment", rep.matching_between}}}};
  return rep;
}

}  // namespace scenic
