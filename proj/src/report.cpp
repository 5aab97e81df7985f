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
#include "scenic/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace scenic {

std::uint64_t Fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string HexDigest(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(digest));
  return buf;
}

Provenance MakeProvenance(const Dataset& ds, const Scenario& scenario,
                          std::uint64_t seed) {
  return {ds.digest(), Fnv1a(ScenarioToJson(scenario)), seed};
}

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

Json Doubles(std::span<const double> v) {
  Json out = Json::array();
  for (double x : v) out.push_back(x);
  return out;
}

}  // namespace

Json ToJson(const Provenance& p) {
  return Json{{"dataset_digest", HexDigest(p.dataset_digest)},
              {"scenario_digest", HexDigest(p.scenario_digest)},
              {"seed", p.seed}};
}

Json ToJson(const InfeasibilityReport& r) {
  return Json{{"offending_labels", r.offending_labels},
              {"evidence", ToString(r.evidence)},
              {"dual_norm_at_stop", r.dual_norm_at_stop},
              {"detail", r.detail}};
}

Json ToJson(const SolverResult& r, bool include_weights) {
  Json rows = Json::array();
  for (std::size_t k = 0; k < r.labels.size(); ++k) {
    const bool eq = r.relations[k] == Relation::kEq;
    rows.push_back(Json{{"label", r.labels[k]},
                        {"relation", ToString(r.relations[k])},
                        {"multiplier", eq ? r.eq_multipliers[k] : r.ineq_multipliers[k]},
                        {"residual", r.residuals[k]},
                        {"active", static_cast<bool>(r.active[k])}});
  }
  Json out{{"status", ToString(r.status)},
           {"entropy", r.entropy},
           {"iterations", r.iterations},
           {"constraints", rows},
           {"warnings", r.warnings}};
  if (r.infeasibility) out["infeasibility"] = ToJson(*r.infeasibility);
  if (include_weights) out["weights"] = Doubles(r.weights);
  return out;
}

Json ToJson(const PointEstimate& e) {
  return Json{{"metric", e.metric},
              {"value", e.value},
              {"entropy", e.entropy},
              {"ess", e.ess},
              {"status", ToString(e.status)}};
}

Json ToJson(const Summary& s) {
  return Json{{"mean", s.mean},
              {"median", s.median},
              {"sd", s.sd},
              {"q05", s.q05},
              {"q95", s.q95},
              {"histogram",
               Json{{"edges", s.histogram.edges}, {"counts", s.histogram.counts}}}};
}

Json ToJson(const BootstrapDistribution& d) {
  return Json{{"metric", d.metric},
              {"B_requested", d.B_requested},
              {"infeasible_fraction", d.infeasible_fraction},
              {"summary", ToJson(d.summary)},
              {"values", d.values},
              {"warnings", d.warnings}};
}

Json ToJson(const WeightDiagnostics& d, bool include_weights) {
  Json out{{"min", d.min},
           {"max", d.max},
           {"quantiles",
            Json{{"q01", d.q01}, {"q25", d.q25}, {"q50", d.q50}, {"q75", d.q75}, {"q99", d.q99}}},
           {"ess", d.ess},
           {"ess_ratio", d.ess_ratio},
           {"entropy_ratio", d.entropy_ratio},
           {"outlier_count", d.outlier_count},
           {"threshold", d.threshold},
           {"boxplot", ToJson(ComputeBoxplot(d.relative_weights, "relative weight"))},
           {"warnings", d.warnings}};
  if (include_weights) out["relative_weights"] = d.relative_weights;
  return out;
}

Json ToJson(const BoxplotStats& b) {
  return Json{{"label", b.label},
              {"median", b.median},
              {"q1", b.q1},
              {"q3", b.q3},
              {"whisker_low", b.whisker_low},
              {"whisker_high", b.whisker_high},
              {"outliers", b.outliers}};
}

Json ToJson(const SpreadPoint& p) {
  Json out{{"multiple", p.multiple}, {"status", ToString(p.status)}};
  out["boxplot"] = p.boxplot ? ToJson(*p.boxplot) : Json(nullptr);
  if (!p.note.empty()) out["note"] = p.note;
  return out;
}

namespace {

Json AxisJson(const SweepAxis& axis) {
  return Json{{"constraint", Json::parse(ScenarioToJson({axis.constraint_template}))
                                 ["constraints"][0]},
              {"grid", axis.grid}};
}

Json CellJson(const SweepCell& c) {
  Json out{{"axis_values", c.axis_values},
           {"infeasible_fraction", c.infeasible_fraction}};
  out["summary"] = c.summary ? ToJson(*c.summary) : Json(nullptr);
  out["boxplot"] = c.boxplot ? ToJson(*c.boxplot) : Json(nullptr);
  out["values"] = c.values;
  if (!c.note.empty()) out["note"] = c.note;
  return out;
}

}  // namespace

Json ToJson(const SweepResult& r) {
  Json axes = Json::array();
  for (const auto& a : r.axes) axes.push_back(AxisJson(a));
  // Nested grid: cells[i_a] is a list over axis b (or a single cell in 1-D).
  Json grid = Json::array();
  const std::size_t na = r.axes.empty() ? 0 : r.axes[0].grid.size();
  const std::size_t nb = r.axes.size() > 1 ? r.axes[1].grid.size() : 1;
  for (std::size_t i = 0; i < na; ++i) {
    if (r.axes.size() == 1) {
      grid.push_back(CellJson(r.at(i)));
      continue;
    }
    Json row = Json::array();
    for (std::size_t j = 0; j < nb; ++j) row.push_back(CellJson(r.at(i, j)));
    grid.push_back(row);
  }
  return Json{{"metric", r.metric}, {"B", r.B}, {"axes", axes}, {"cells", grid}};
}

Json ToJson(const ExchangeRate& e) {
  Json pts = Json::array();
  for (const auto& p : e.points) pts.push_back(Json{{"a", p.a}, {"b", p.b}});
  return Json{{"points", pts}, {"warnings", e.warnings}};
}

Json ToJson(const PropensityModel& m) {
  Json feats = Json::array();
  for (std::size_t j = 0; j < m.features.size(); ++j) {
    feats.push_back(Json{{"name", m.features[j]},
                         {"coefficient", m.coefficients[j]},
                         {"std_error", m.std_errors[j]},
                         {"mean", m.standardization[j].first},
                         {"sd", m.standardization[j].second}});
  }
  return Json{{"intercept", m.intercept},
              {"features", feats},
              {"converged", m.converged},
              {"separation", m.separation},
              {"iterations", m.iterations},
              {"warnings", m.warnings}};
}

Json ToJson(const MatchResult& m, bool include_pairs) {
  Json out{{"n_pairs", m.pairs.size()},
           {"unmatched_treatment", m.unmatched_treatment},
           {"score_sd", m.score_sd},
           {"estimate", m.estimate}};
  out["caliper"] = m.caliper ? Json(*m.caliper) : Json(nullptr);
  if (include_pairs) {
    Json pairs = Json::array();
    for (const auto& [t, c] : m.pairs) pairs.push_back(Json::array({t, c}));
    out["pairs"] = pairs;
  }
  return out;
}

Json ToJson(const ColumnSpec& c) {
  Json out{{"name", c.name}, {"kind", ToString(c.kind)}};
  if (!c.units.empty()) out["units"] = c.units;
  return out;
}

void WriteWeightsCsv(std::ostream& out, std::span<const double> weights) {
  const double n = static_cast<double>(weights.size());
  out << "row,weight,relative_weight\n";
  for (std::size_t i = 0; i < weights.size(); ++i) {
    out << i << ',' << FormatDouble(weights[i]) << ','
        << FormatDouble(n * weights[i]) << '\n';
  }
}

void WriteValuesCsv(std::ostream& out,
                    const std::vector<BootstrapDistribution>& dists) {
  out << "draw";
  for (const auto& d : dists) out << ',' << d.metric;
  out << '\n';
  const std::size_t rows = dists.empty() ? 0 : dists.front().values.size();
  for (std::size_t i = 0; i < rows; ++i) {
    out << i;
    for (const auto& d : dists) out << ',' << FormatDouble(d.values[i]);
    out << '\n';
  }
}

void WriteBoxplotCsv(std::ostream& out, const std::vector<BoxplotStats>& boxes) {
  out << "label,q1,median,q3,lo,hi,outliers\n";
  for (const auto& b : boxes) {
    out << '"' << b.label << "\"," << FormatDouble(b.q1) << ','
        << FormatDouble(b.median) << ',' << FormatDouble(b.q3) << ','
        << FormatDouble(b.whisker_low) << ',' << FormatDouble(b.whisker_high)
        << ',';
    for (std::size_t i = 0; i < b.outliers.size(); ++i) {
      out << (i ? " " : "") << FormatDouble(b.outliers[i]);
    }
    out << '\n';
  }
}

void WriteSweepCsv(std::ostream& out, const SweepResult& r) {
  out << "a";
  if (r.axes.size() > 1) out << ",b";
  out << ",median,sd,q05,q95,infeasible_fraction\n";
  for (const auto& c : r.cells) {
    for (std::size_t i = 0; i < c.axis_values.size(); ++i) {
      out << (i ? "," : "") << FormatDouble(c.axis_values[i]);
    }
    if (c.summary) {
      out << ',' << FormatDouble(c.summary->median) << ','
          << FormatDouble(c.summary->sd) << ',' << FormatDouble(c.summary->q05)
          << ',' << FormatDouble(c.summary->q95);
    } else {
      out << ",,,,";
    }
    out << ',' << FormatDouble(c.infeasible_fraction) << '\n';
  }
}

void WritePairsCsv(std::ostream& out, const MatchResult& m) {
  out << "treatment_row,control_row,treatment_score,control_score\n";
  for (std::size_t i = 0; i < m.pairs.size(); ++i) {
    out << m.pairs[i].first << ',' << m.pairs[i].second << ','
        << FormatDouble(m.treatment_scores[i]) << ','
        << FormatDouble(m.control_scores[i]) << '\n';
  }
}

void WriteHistogramCsv(std::ostream& out,
                       const std::vector<BootstrapDistribution>& dists) {
  out << "pane,bin,lo,hi,count\n";
  for (const auto& d : dists) {
    const auto& h = d.summary.histogram;
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      out << d.metric << ',' << b << ',' << FormatDouble(h.edges[b]) << ','
          << FormatDouble(h.edges[b + 1]) << ',' << h.counts[b] << '\n';
    }
  }
}

}  // namespace scenic
