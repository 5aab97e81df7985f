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
#include "scenic/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "scenic/errors.hpp"

namespace scenic {

using json = nlohmann::json;

std::string ToString(TargetMode mode) {
  switch (mode) {
    case TargetMode::kAbsolute:
      return "absolute";
    case TargetMode::kMultipleOfBaseline:
      return "multiple-of-baseline";
    case TargetMode::kLiftPercent:
      return "lift-percent";
  }
  return "unknown";
}

std::string ToString(Statistic statistic) {
  switch (statistic) {
    case Statistic::kWeightedMean:
      return "weighted-mean";
    case Statistic::kWeightedProportion:
      return "weighted-proportion";
    case Statistic::kConditionalMean:
      return "conditional-mean";
    case Statistic::kCountMultiplier:
      return "count-multiplier";
  }
  return "unknown";
}

std::string ToString(Relation relation) {
  switch (relation) {
    case Relation::kEq:
      return "eq";
    case Relation::kLe:
      return "le";
    case Relation::kGe:
      return "ge";
  }
  return "unknown";
}

namespace {

std::string FormatNumber(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

template <typename Enum, std::size_t N>
Enum ParseEnum(const json& node, const std::string& path,
               const std::array<Enum, N>& options) {
  if (!node.is_string()) throw ScenarioError(path + ": expected a string");
  const auto text = node.get<std::string>();
  for (Enum e : options) {
    if (ToString(e) == text) return e;
  }
  std::string allowed;
  for (Enum e : options) allowed += (allowed.empty() ? "" : ", ") + ToString(e);
  throw ScenarioError(path + ": '" + text + "' is not one of {" + allowed + "}");
}

void RejectUnknownKeys(const json& obj, const std::string& path,
                       std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                [&](const char* a) { return key == a; });
    if (!ok) throw ScenarioError(path + ": unknown field '" + key + "'");
  }
}

const json& Require(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) {
    throw ScenarioError(path + ": missing required field '" + key + "'");
  }
  return obj.at(key);
}

std::string RequireString(const json& obj, const std::string& path,
                          const char* key) {
  const json& node = Require(obj, path, key);
  if (!node.is_string() || node.get<std::string>().empty()) {
    throw ScenarioError(path + "." + key + ": expected a non-empty string");
  }
  return node.get<std::string>();
}

void CheckSpecShape(const ConstraintSpec& spec, const std::string& path) {
  if (spec.statistic == Statistic::kConditionalMean && !spec.condition) {
    throw ScenarioError(path + ": conditional-mean requires 'condition'");
  }
  if (spec.statistic == Statistic::kCountMultiplier) {
    if (spec.relation != Relation::kEq) {
      throw ScenarioError(path + ": count-multiplier requires relation 'eq'");
    }
    if (spec.target.mode != TargetMode::kMultipleOfBaseline) {
      throw ScenarioError(path +
                          ": count-multiplier requires mode 'multiple-of-baseline'");
    }
    if (!(spec.target.value > 0.0)) {
      throw ScenarioError(path + ": count-multiplier needs a factor > 0");
    }
  }
  if (!std::isfinite(spec.target.value)) {
    throw ScenarioError(path + ".target.value: must be finite");
  }
}

}  // namespace

std::string ConstraintSpec::DisplayLabel() const {
  if (label) return *label;
  std::string s = ToString(statistic) + "(" + feature;
  if (condition) s += " | " + *condition;
  s += ") " + ToString(relation) + " ";
  switch (target.mode) {
    case TargetMode::kAbsolute:
      s += FormatNumber(target.value);
      break;
    case TargetMode::kMultipleOfBaseline:
      s += "x" + FormatNumber(target.value);
      break;
    case TargetMode::kLiftPercent:
      s += (target.value >= 0 ? "+" : "") + FormatNumber(target.value) + "%";
      break;
  }
  return s;
}

Scenario ParseScenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ScenarioError("$: expected an object");
  RejectUnknownKeys(doc, "$", {"constraints"});
  const json& list = Require(doc, "$", "constraints");
  if (!list.is_array()) throw ScenarioError("constraints: expected an array");

  Scenario out;
  std::set<std::string> labels;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "constraints[" + std::to_string(i) + "]";
    const json& node = list[i];
    if (!node.is_object()) throw ScenarioError(path + ": expected an object");
    RejectUnknownKeys(node, path, {"label", "feature", "condition", "statistic",
                                   "relation", "target"});
    ConstraintSpec spec;
    if (node.contains("label")) {
      spec.label = RequireString(node, path, "label");
      if (!labels.insert(*spec.label).second) {
        throw ScenarioError(path + ".label: duplicate label '" + *spec.label + "'");
      }
    }
    spec.feature = RequireString(node, path, "feature");
    if (node.contains("condition")) {
      spec.condition = RequireString(node, path, "condition");
    }
    spec.statistic = ParseEnum<Statistic, 4>(
        Require(node, path, "statistic"), path + ".statistic",
        {Statistic::kWeightedMean, Statistic::kWeightedProportion,
         Statistic::kConditionalMean, Statistic::kCountMultiplier});
    spec.relation = ParseEnum<Relation, 3>(
        Require(node, path, "relation"), path + ".relation",
        {Relation::kEq, Relation::kLe, Relation::kGe});
    const std::string tpath = path + ".target";
    const json& target = Require(node, path, "target");
    if (!target.is_object()) throw ScenarioError(tpath + ": expected an object");
    RejectUnknownKeys(target, tpath, {"mode", "value"});
    spec.target.mode = ParseEnum<TargetMode, 3>(
        Require(target, tpath, "mode"), tpath + ".mode",
        {TargetMode::kAbsolute, TargetMode::kMultipleOfBaseline,
         TargetMode::kLiftPercent});
    const json& value = Require(target, tpath, "value");
    if (!value.is_number()) throw ScenarioError(tpath + ".value: expected a number");
    spec.target.value = value.get<double>();
    CheckSpecShape(spec, path);
    out.push_back(std::move(spec));
  }
  return out;
}

Scenario LoadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseScenario(buf.str());
}

std::string ScenarioToJson(const Scenario& scenario) {
  json list = json::array();
  for (const auto& s : scenario) {
    json c;
    if (s.label) c["label"] = *s.label;
    c["feature"] = s.feature;
    if (s.condition) c["condition"] = *s.condition;
    c["statistic"] = ToString(s.statistic);
    c["relation"] = ToString(s.relation);
    c["target"] = {{"mode", ToString(s.target.mode)}, {"value", s.target.value}};
    list.push_back(std::move(c));
  }
  return json{{"constraints", list}}.dump();
}

double CountMultiplierToProportion(double gamma, double baseline_proportion) {
  if (!(gamma > 0.0)) throw UsageError("count multiplier must be > 0");
  if (!(baseline_proportion >= 0.0 && baseline_proportion <= 1.0)) {
    throw UsageError("baseline proportion must lie in [0, 1]");
  }
  const double p = baseline_proportion;
  return gamma * p / (1.0 + (gamma - 1.0) * p);
}

namespace {

void CheckFeature(const ConstraintSpec& spec, const Dataset& ds) {
  const std::string label = spec.DisplayLabel();
  if (!ds.has_column(spec.feature)) {
    throw ScenarioError(label + ": unknown column '" + spec.feature + "'");
  }
  const ColumnKind kind = ds.spec(spec.feature).kind;
  if (kind == ColumnKind::kMetric) {
    throw ScenarioError(label + ": '" + spec.feature +
                        "' is a metric column, not a feature");
  }
  if ((spec.statistic == Statistic::kWeightedProportion ||
       spec.statistic == Statistic::kCountMultiplier) &&
      kind != ColumnKind::kIndicatorFeature) {
    throw ScenarioError(label + ": " + ToString(spec.statistic) +
                        " requires an indicator feature");
  }
  if (spec.statistic == Statistic::kConditionalMean && !spec.condition) {
    throw ScenarioError(label + ": conditional-mean requires a condition");
  }
  if (spec.condition) {
    if (!ds.has_column(*spec.condition)) {
      throw ScenarioError(label + ": unknown condition column '" +
                          *spec.condition + "'");
    }
    if (ds.spec(*spec.condition).kind != ColumnKind::kIndicatorFeature) {
      throw ScenarioError(label + ": condition '" + *spec.condition +
                          "' is not an indicator");
    }
    const auto mask = ds.column(*spec.condition);
    if (std::find(mask.begin(), mask.end(), 1.0) == mask.end()) {
      throw ScenarioError(label + ": condition '" + *spec.condition +
                          "' selects no rows");
    }
  }
}

}  // namespace

double BaselineStatistic(const ConstraintSpec& spec, const Dataset& ds) {
  CheckFeature(spec, ds);
  const auto f = ds.column(spec.feature);
  if (spec.statistic == Statistic::kConditionalMean) {
    const auto mask = ds.column(*spec.condition);
    double sum = 0.0, count = 0.0;
    for (std::size_t r = 0; r < f.size(); ++r) {
      if (mask[r] == 1.0) {
        sum += f[r];
        count += 1.0;
      }
    }
    return sum / count;
  }
  double sum = 0.0;
  for (double v : f) sum += v;
  return sum / static_cast<double>(f.size());
}

Scenario ResolveTargets(const Scenario& scenario, const Dataset& ds) {
  Scenario out;
  out.reserve(scenario.size());
  std::set<std::string> used;
  for (const auto& spec : scenario) {
    CheckSpecShape(spec, spec.DisplayLabel());
    ConstraintSpec resolved = spec;
    std::string label = spec.DisplayLabel();
    for (int k = 2; !used.insert(label).second; ++k) {
      label = spec.DisplayLabel() + " #" + std::to_string(k);
    }
    resolved.label = label;
    if (spec.target.mode != TargetMode::kAbsolute) {
      const double baseline = BaselineStatistic(spec, ds);
      double value = 0.0;
      if (spec.statistic == Statistic::kCountMultiplier) {
        value = CountMultiplierToProportion(spec.target.value, baseline);
        resolved.statistic = Statistic::kWeightedProportion;
      } else if (spec.target.mode == TargetMode::kMultipleOfBaseline) {
        value = spec.target.value * baseline;
      } else {
        value = baseline * (1.0 + spec.target.value / 100.0);
      }
      if (!std::isfinite(value)) {
        throw ScenarioError(label + ": resolved target is not finite");
      }
      resolved.target = {TargetMode::kAbsolute, value};
    } else {
      CheckFeature(spec, ds);
    }
    out.push_back(std::move(resolved));
  }
  return out;
}

CompiledConstraints Compile(const Scenario& scenario, const Dataset& ds) {
  const Scenario resolved = ResolveTargets(scenario, ds);
  const std::size_t n = ds.n_rows();
  CompiledConstraints out;
  out.n_observations = n;
  InfeasibilityReport report;
  report.evidence = InfeasibilityEvidence::kRangeViolation;

  for (const auto& spec : resolved) {
    const auto f = ds.column(spec.feature);
    const double v = spec.target.value;
    std::vector<double> row(n);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double b = v;
    if (spec.statistic == Statistic::kConditionalMean) {
      // Linearized conditional mean: sum w 1_C (f - v) = 0.
      const auto mask = ds.column(*spec.condition);
      for (std::size_t r = 0; r < n; ++r) {
        row[r] = mask[r] == 1.0 ? f[r] - v : 0.0;
        if (mask[r] == 1.0) {
          lo = std::min(lo, f[r]);
          hi = std::max(hi, f[r]);
        }
      }
      b = 0.0;
    } else {
      for (std::size_t r = 0; r < n; ++r) {
        row[r] = f[r];
        lo = std::min(lo, f[r]);
        hi = std::max(hi, f[r]);
      }
    }
    const bool out_of_range =
        (spec.relation == Relation::kEq && (v < lo || v > hi)) ||
        (spec.relation == Relation::kGe && v > hi) ||
        (spec.relation == Relation::kLe && v < lo);
    if (out_of_range) {
      report.offending_labels.push_back(*spec.label);
      if (!report.detail.empty()) report.detail += "; ";
      report.detail += *spec.label + ": target " + FormatNumber(v) +
                       " outside reachable range [" + FormatNumber(lo) + ", " +
                       FormatNumber(hi) + "]";
    }
    out.rows.push_back(std::move(row));
    out.targets.push_back(b);
    out.relations.push_back(spec.relation);
    out.labels.push_back(*spec.label);
  }
  if (!report.offending_labels.empty()) throw InfeasibleScenario(report);
  return out;
}

}  // namespace scenic
