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
#include "scenic/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "json.hpp"
#include "scenic/errors.hpp"

namespace scenic {

using json = nlohmann::json;

std::string ToString(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::kNumericFeature:
      return "numeric-feature";
    case ColumnKind::kIndicatorFeature:
      return "indicator-feature";
    case ColumnKind::kMetric:
      return "metric";
  }
  return "unknown";
}

ColumnKind ParseColumnKind(std::string_view text) {
  if (text == "numeric-feature") return ColumnKind::kNumericFeature;
  if (text == "indicator-feature") return ColumnKind::kIndicatorFeature;
  if (text == "metric") return ColumnKind::kMetric;
  throw DataError("unknown column kind '" + std::string(text) + "'");
}

// --- Dataset --------------------------------------------------------------

Dataset::Dataset(std::vector<ColumnSpec> specs,
                 std::vector<std::vector<double>> columns)
    : specs_(std::move(specs)), columns_(std::move(columns)) {
  if (specs_.size() != columns_.size()) {
    throw DataError("column spec count does not match column count");
  }
  if (specs_.empty()) throw DataError("dataset has no columns");
  n_rows_ = columns_.front().size();
  if (n_rows_ == 0) throw DataError("no rows");
  bool has_metric = false;
  for (std::size_t c = 0; c < specs_.size(); ++c) {
    const ColumnSpec& s = specs_[c];
    if (s.name.empty()) throw DataError("empty column name");
    if (!index_.emplace(s.name, c).second) {
      throw DataError("duplicate column name '" + s.name + "'");
    }
    if (columns_[c].size() != n_rows_) {
      throw DataError("column '" + s.name + "' has " +
                      std::to_string(columns_[c].size()) + " entries, expected " +
                      std::to_string(n_rows_));
    }
    for (std::size_t r = 0; r < n_rows_; ++r) {
      const double v = columns_[c][r];
      if (!std::isfinite(v)) {
        throw DataError("non-finite value in column '" + s.name + "' row " +
                        std::to_string(r + 1));
      }
      if (s.kind == ColumnKind::kIndicatorFeature && v != 0.0 && v != 1.0) {
        throw DataError("indicator column '" + s.name + "' row " +
                        std::to_string(r + 1) + " is not 0 or 1");
      }
    }
    has_metric = has_metric || s.kind == ColumnKind::kMetric;
  }
  if (!has_metric) throw DataError("dataset has no metric column");
}

std::size_t Dataset::n_features() const {
  return static_cast<std::size_t>(
      std::count_if(specs_.begin(), specs_.end(),
                    [](const ColumnSpec& s) { return s.is_feature(); }));
}

bool Dataset::has_column(std::string_view name) const {
  return index_.find(std::string(name)) != index_.end();
}

std::size_t Dataset::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) {
    throw DataError("unknown column '" + std::string(name) + "'");
  }
  return it->second;
}

const ColumnSpec& Dataset::spec(std::string_view name) const {
  return specs_[index_of(name)];
}

std::span<const double> Dataset::column(std::string_view name) const {
  return columns_[index_of(name)];
}

std::span<const double> Dataset::column(std::size_t index) const {
  if (index >= columns_.size()) throw DataError("column index out of range");
  return columns_[index];
}

std::vector<std::string> Dataset::feature_names() const {
  std::vector<std::string> out;
  for (const auto& s : specs_) {
    if (s.is_feature()) out.push_back(s.name);
  }
  return out;
}

std::vector<std::string> Dataset::metric_names() const {
  std::vector<std::string> out;
  for (const auto& s : specs_) {
    if (!s.is_feature()) out.push_back(s.name);
  }
  return out;
}

Dataset Dataset::take(std::span<const std::size_t> rows) const {
  std::vector<std::vector<double>> cols(columns_.size());
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    cols[c].reserve(rows.size());
    for (std::size_t r : rows) {
      if (r >= n_rows_) throw UsageError("row index out of range");
      cols[c].push_back(columns_[c][r]);
    }
  }
  return Dataset(specs_, std::move(cols));
}

Dataset Dataset::filter(std::string_view indicator, double value) const {
  const std::size_t c = index_of(indicator);
  if (specs_[c].kind != ColumnKind::kIndicatorFeature) {
    throw DataError("column '" + std::string(indicator) +
                    "' is not an indicator");
  }
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < n_rows_; ++r) {
    if (columns_[c][r] == value) rows.push_back(r);
  }
  if (rows.empty()) {
    throw DataError("no rows with " + std::string(indicator) + " = " +
                    std::to_string(static_cast<int>(value)));
  }
  return take(rows);
}

Dataset Dataset::with_column(ColumnSpec spec, std::vector<double> values) const {
  auto specs = specs_;
  auto cols = columns_;
  specs.push_back(std::move(spec));
  cols.push_back(std::move(values));
  return Dataset(std::move(specs), std::move(cols));
}

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void FnvMix(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

}  // namespace

std::uint64_t Dataset::digest() const {
  std::uint64_t h = kFnvOffset;
  for (std::size_t c = 0; c < specs_.size(); ++c) {
    FnvMix(h, specs_[c].name.data(), specs_[c].name.size());
    const auto kind = static_cast<unsigned char>(specs_[c].kind);
    FnvMix(h, &kind, 1);
    FnvMix(h, columns_[c].data(), columns_[c].size() * sizeof(double));
  }
  return h;
}

// --- schema ---------------------------------------------------------------

std::vector<ColumnSpec> ParseSchema(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("schema is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("columns") ||
      !doc["columns"].is_array()) {
    throw DataError("schema must be an object with a 'columns' array");
  }
  std::vector<ColumnSpec> out;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < doc["columns"].size(); ++i) {
    const json& col = doc["columns"][i];
    const std::string where = "columns[" + std::to_string(i) + "]";
    if (!col.is_object() || !col.contains("name") || !col["name"].is_string() ||
        !col.contains("kind") || !col["kind"].is_string()) {
      throw DataError(where + " needs string fields 'name' and 'kind'");
    }
    ColumnSpec spec;
    spec.name = col["name"].get<std::string>();
    spec.kind = ParseColumnKind(col["kind"].get<std::string>());
    if (col.contains("units") && col["units"].is_string()) {
      spec.units = col["units"].get<std::string>();
    }
    if (!seen.insert(spec.name).second) {
      throw DataError(where + ": duplicate column name '" + spec.name + "'");
    }
    out.push_back(std::move(spec));
  }
  if (out.empty()) throw DataError("schema declares no columns");
  return out;
}

std::vector<ColumnSpec> LoadSchema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open schema file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseSchema(buf.str());
}

std::string SchemaToJson(const std::vector<ColumnSpec>& schema) {
  json cols = json::array();
  for (const auto& s : schema) {
    json c = {{"name", s.name}, {"kind", ToString(s.kind)}};
    if (!s.units.empty()) c["units"] = s.units;
    cols.push_back(std::move(c));
  }
  return json{{"columns", cols}}.dump(2);
}

// --- CSV ------------------------------------------------------------------

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

void SplitCsvLine(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(Trim(line.substr(start)));
      return;
    }
    out.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

bool IsBlank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\r';
  });
}

double ParseCell(std::string_view cell, const std::string& column,
                 ColumnKind kind, std::size_t row) {
  const std::string where =
      "row " + std::to_string(row) + ", column \"" + column + "\"";
  if (cell.empty()) throw DataError("missing value at " + where);
  double value = 0.0;
  const char* first = cell.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw DataError("cannot parse '" + std::string(cell) + "' at " + where);
  }
  if (!std::isfinite(value)) throw DataError("non-finite value at " + where);
  if (kind == ColumnKind::kIndicatorFeature && value != 0.0 && value != 1.0) {
    throw DataError("indicator value '" + std::string(cell) +
                    "' is not 0 or 1 at " + where);
  }
  return value;
}

}  // namespace

Dataset ReadCsv(std::istream& in, const std::vector<ColumnSpec>& schema) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: no header row");
  std::vector<std::string_view> cells;
  SplitCsvLine(line, cells);
  if (cells.size() != schema.size()) {
    throw DataError("header has " + std::to_string(cells.size()) +
                    " columns, schema declares " + std::to_string(schema.size()));
  }
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (cells[c] != schema[c].name) {
      throw DataError("header column " + std::to_string(c + 1) + " is '" +
                      std::string(cells[c]) + "', schema expects '" +
                      schema[c].name + "'");
    }
  }
  std::vector<std::vector<double>> cols(schema.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (IsBlank(line)) continue;
    ++row;
    SplitCsvLine(line, cells);
    if (cells.size() != schema.size()) {
      throw DataError("row " + std::to_string(row) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(schema.size()));
    }
    for (std::size_t c = 0; c < schema.size(); ++c) {
      cols[c].push_back(ParseCell(cells[c], schema[c].name, schema[c].kind, row));
    }
  }
  if (row == 0) throw DataError("no rows");
  return Dataset(schema, std::move(cols));
}

Dataset LoadCsv(const std::string& path, const std::vector<ColumnSpec>& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  return ReadCsv(in, schema);
}

void WriteCsv(const Dataset& ds, std::ostream& out) {
  const auto& specs = ds.specs();
  for (std::size_t c = 0; c < specs.size(); ++c) {
    out << (c ? "," : "") << specs[c].name;
  }
  out << '\n';
  char buf[32];
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    for (std::size_t c = 0; c < specs.size(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.column(c)[r]);
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
}

void WriteCsv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  WriteCsv(ds, out);
}

std::vector<ColumnSpec> CriteoSchema() {
  std::vector<ColumnSpec> schema;
  for (int i = 0; i < 12; ++i) {
    schema.push_back({"f" + std::to_string(i), ColumnKind::kNumericFeature, ""});
  }
  schema.push_back({"treatment", ColumnKind::kIndicatorFeature, ""});
  schema.push_back({"visit", ColumnKind::kMetric, "probability"});
  schema.push_back({"conversion", ColumnKind::kMetric, "probability"});
  return schema;
}

Dataset LoadCriteo(const std::string& path, std::size_t max_rows) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open Criteo file '" + path + "'");
  const auto schema = CriteoSchema();
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: no header row");
  std::vector<std::string_view> cells;
  SplitCsvLine(line, cells);
  std::vector<std::size_t> position(schema.size());
  for (std::size_t c = 0; c < schema.size(); ++c) {
    auto it = std::find(cells.begin(), cells.end(), schema[c].name);
    if (it == cells.end()) {
      throw DataError("Criteo file is missing column '" + schema[c].name + "'");
    }
    position[c] = static_cast<std::size_t>(it - cells.begin());
  }
  const std::size_t width = cells.size();
  std::vector<std::vector<double>> cols(schema.size());
  std::size_t row = 0;
  while ((max_rows == 0 || row < max_rows) && std::getline(in, line)) {
    if (IsBlank(line)) continue;
    ++row;
    SplitCsvLine(line, cells);
    if (cells.size() != width) {
      throw DataError("row " + std::to_string(row) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(width));
    }
    for (std::size_t c = 0; c < schema.size(); ++c) {
      cols[c].push_back(
          ParseCell(cells[position[c]], schema[c].name, schema[c].kind, row));
    }
  }
  if (row == 0) throw DataError("no rows");
  return Dataset(schema, std::move(cols));
}

// --- resampling -----------------------------------------------------------

void ResamplePlan::Validate(std::size_t n_rows) const {
  if (B < 1) throw UsageError("resample plan needs B >= 1");
  if (mode == ResampleMode::kBootstrap) {
    if (m < 1) throw UsageError("bootstrap resample size m must be >= 1");
  } else if (B > n_rows) {
    throw UsageError("disjoint subsets need B <= N (B=" + std::to_string(B) +
                     ", N=" + std::to_string(n_rows) + ")");
  }
}

namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kShuffleStream = ~0ULL;

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(SplitMix64(seed) ^ SplitMix64(index + 0x632BE59BD9B4E019ULL));
}

std::vector<std::size_t> ResampleIndices(std::size_t n_rows,
                                         const ResamplePlan& plan,
                                         std::size_t index) {
  plan.Validate(n_rows);
  if (index >= plan.B) {
    throw UsageError("resample index " + std::to_string(index) +
                     " out of range [0, " + std::to_string(plan.B) + ")");
  }
  if (plan.mode == ResampleMode::kBootstrap) {
    std::mt19937_64 rng(DeriveSeed(plan.seed, index));
    std::uniform_int_distribution<std::size_t> pick(0, n_rows - 1);
    std::vector<std::size_t> rows(plan.m);
    for (auto& r : rows) r = pick(rng);
    return rows;
  }
  std::vector<std::size_t> order(n_rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(DeriveSeed(plan.seed, kShuffleStream));
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t begin = index * n_rows / plan.B;
  const std::size_t end = (index + 1) * n_rows / plan.B;
  return {order.begin() + static_cast<std::ptrdiff_t>(begin),
          order.begin() + static_cast<std::ptrdiff_t>(end)};
}

Dataset Resample(const Dataset& ds, const ResamplePlan& plan,
                 std::size_t index) {
  const auto rows = ResampleIndices(ds.n_rows(), plan, index);
  return ds.take(rows);
}

std::map<std::string, double> ColumnMeans(
    const Dataset& ds, const std::vector<std::string>& columns,
    const std::optional<std::string>& condition) {
  std::span<const double> mask;
  std::size_t count = ds.n_rows();
  if (condition) {
    if (ds.spec(*condition).kind != ColumnKind::kIndicatorFeature) {
      throw DataError("condition column '" + *condition +
                      "' is not an indicator");
    }
    mask = ds.column(*condition);
    count = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1.0));
    if (count == 0) {
      throw DataError("condition '" + *condition + "' selects no rows");
    }
  }
  std::map<std::string, double> out;
  for (const auto& name : columns) {
    const auto col = ds.column(name);
    double sum = 0.0;
    for (std::size_t r = 0; r < col.size(); ++r) {
      if (mask.empty() || mask[r] == 1.0) sum += col[r];
    }
    out[name] = sum / static_cast<double>(count);
  }
  return out;
}

// --- planted tilt -----------------------------------------------------------

std::vector<MixtureComponent> DefaultMixture(std::size_t dims) {
  return {
      {0.6, std::vector<double>(dims, 0.0), std::vector<double>(dims, 1.0)},
      {0.4, std::vector<double>(dims, 1.5), std::vector<double>(dims, 0.8)},
  };
}

namespace {

double NormalCdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

struct Mixture {
  std::vector<double> weights;
  std::vector<std::vector<double>> means;
  std::vector<std::vector<double>> sds;
};

Mixture CheckedMixture(const std::vector<MixtureComponent>& comps,
                       std::size_t dims) {
  if (comps.empty()) throw UsageError("mixture has no components");
  Mixture mix;
  double total = 0.0;
  for (const auto& c : comps) {
    if (c.mean.size() != dims || c.sd.size() != dims) {
      throw UsageError("mixture component dimension does not match tilt");
    }
    if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
      throw UsageError("mixture weights must be positive");
    }
    for (std::size_t d = 0; d < dims; ++d) {
      if (!(c.sd[d] >= 0.0) || !std::isfinite(c.mean[d])) {
        throw UsageError("mixture means must be finite and sds nonnegative");
      }
    }
    total += c.weight;
    mix.weights.push_back(c.weight);
    mix.means.push_back(c.mean);
    mix.sds.push_back(c.sd);
  }
  for (auto& w : mix.weights) w /= total;
  return mix;
}

// Exponential tilt of a diagonal Gaussian mixture: each component shifts its
// mean by tilt * sd^2 and its weight by the component's moment generating
// function at the tilt.
Mixture TiltMixture(const Mixture& base, const std::vector<double>& tilt) {
  Mixture out = base;
  std::vector<double> log_w(base.weights.size());
  for (std::size_t k = 0; k < base.weights.size(); ++k) {
    double lw = std::log(base.weights[k]);
    for (std::size_t d = 0; d < tilt.size(); ++d) {
      const double var = base.sds[k][d] * base.sds[k][d];
      lw += tilt[d] * base.means[k][d] + 0.5 * tilt[d] * tilt[d] * var;
      out.means[k][d] = base.means[k][d] + tilt[d] * var;
    }
    log_w[k] = lw;
  }
  const double mx = *std::max_element(log_w.begin(), log_w.end());
  double total = 0.0;
  for (std::size_t k = 0; k < log_w.size(); ++k) {
    out.weights[k] = std::exp(log_w[k] - mx);
    total += out.weights[k];
  }
  for (auto& w : out.weights) w /= total;
  return out;
}

// (E[e^{tilt.x}])^2 / E[e^{2 tilt.x}]: the acceptance efficiency an importance
// sampler from the base would have.
double TiltEfficiency(const Mixture& base, const std::vector<double>& tilt) {
  std::vector<double> l1, l2;
  for (std::size_t k = 0; k < base.weights.size(); ++k) {
    double a = std::log(base.weights[k]), b = a;
    for (std::size_t d = 0; d < tilt.size(); ++d) {
      const double var = base.sds[k][d] * base.sds[k][d];
      a += tilt[d] * base.means[k][d] + 0.5 * tilt[d] * tilt[d] * var;
      b += 2.0 * tilt[d] * base.means[k][d] + 2.0 * tilt[d] * tilt[d] * var;
    }
    l1.push_back(a);
    l2.push_back(b);
  }
  auto lse = [](const std::vector<double>& v) {
    const double mx = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
  };
  return std::exp(2.0 * lse(l1) - lse(l2));
}

struct MetricTruth {
  std::vector<double> feature_means;
  double t = 0.0;
  double visit = 0.0;
  double conversion = 0.0;
};

MetricTruth ExactMeans(const Mixture& mix, const SyntheticSpec& spec,
                       const std::vector<double>& coef) {
  const std::size_t dims = coef.size();
  MetricTruth truth;
  truth.feature_means.assign(dims, 0.0);
  for (std::size_t k = 0; k < mix.weights.size(); ++k) {
    double mu = 0.0, var = spec.noise_sd * spec.noise_sd;
    for (std::size_t d = 0; d < dims; ++d) {
      truth.feature_means[d] += mix.weights[k] * mix.means[k][d];
      mu += coef[d] * mix.means[k][d];
      var += coef[d] * coef[d] * mix.sds[k][d] * mix.sds[k][d];
    }
    truth.t += mix.weights[k] * mu;
    const double sd = std::sqrt(var);
    auto exceed = [&](double threshold) {
      if (sd == 0.0) return mu > threshold ? 1.0 : 0.0;
      return 1.0 - NormalCdf((threshold - mu) / sd);
    };
    truth.visit += mix.weights[k] * exceed(spec.visit_threshold);
    truth.conversion += mix.weights[k] * exceed(spec.conversion_threshold);
  }
  return truth;
}

Dataset SampleMixture(const Mixture& mix, const SyntheticSpec& spec,
                      const std::vector<double>& coef, std::size_t n,
                      std::uint64_t seed) {
  const std::size_t dims = coef.size();
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> component(mix.weights.begin(),
                                                    mix.weights.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> cols(dims + 3, std::vector<double>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t k = component(rng);
    double score = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      const double x = mix.means[k][d] + mix.sds[k][d] * normal(rng);
      cols[d][r] = x;
      score += coef[d] * x;
    }
    score += spec.noise_sd * normal(rng);
    cols[dims][r] = score;
    cols[dims + 1][r] = score > spec.visit_threshold ? 1.0 : 0.0;
    cols[dims + 2][r] = score > spec.conversion_threshold ? 1.0 : 0.0;
  }
  std::vector<ColumnSpec> specs;
  for (std::size_t d = 0; d < dims; ++d) {
    specs.push_back({spec.feature_prefix + std::to_string(d),
                     ColumnKind::kNumericFeature, ""});
  }
  specs.push_back({"t", ColumnKind::kMetric, ""});
  specs.push_back({"visit", ColumnKind::kMetric, "probability"});
  specs.push_back({"conversion", ColumnKind::kMetric, "probability"});
  return Dataset(std::move(specs), std::move(cols));
}

std::map<std::string, double> TruthMap(const MetricTruth& truth,
                                       const std::string& prefix) {
  std::map<std::string, double> out;
  for (std::size_t d = 0; d < truth.feature_means.size(); ++d) {
    out[prefix + std::to_string(d)] = truth.feature_means[d];
  }
  out["t"] = truth.t;
  out["visit"] = truth.visit;
  out["conversion"] = truth.conversion;
  return out;
}

}  // namespace

PlantedTilt GeneratePlantedTilt(const SyntheticSpec& spec) {
  if (spec.n < 100) throw UsageError("synthetic data needs n >= 100");
  const std::size_t dims = spec.tilt.size();
  if (dims == 0) throw UsageError("tilt vector is empty");
  for (double v : spec.tilt) {
    if (!std::isfinite(v)) throw UsageError("tilt must be finite");
  }
  if (!(spec.noise_sd >= 0.0)) throw UsageError("noise_sd must be >= 0");
  std::vector<double> coef = spec.outcome_coef;
  if (coef.empty()) coef.assign(dims, 1.0);
  if (coef.size() != dims) {
    throw UsageError("outcome_coef dimension does not match tilt");
  }
  const Mixture base =
      CheckedMixture(spec.base.empty() ? DefaultMixture(dims) : spec.base, dims);
  const double efficiency = TiltEfficiency(base, spec.tilt);
  if (efficiency < 1e-4) {
    throw UsageError("tilt too extreme for stable sampling (efficiency " +
                     std::to_string(efficiency) + " < 1e-4)");
  }
  const Mixture tilted = TiltMixture(base, spec.tilt);
  const std::size_t n_treat = spec.n_treatment ? spec.n_treatment : spec.n;
  Dataset control = SampleMixture(base, spec, coef, spec.n, DeriveSeed(spec.seed, 0));
  Dataset treatment = SampleMixture(tilted, spec, coef, n_treat,
                                    DeriveSeed(spec.seed, 1));
  return PlantedTilt{
      std::move(control), std::move(treatment),
      TruthMap(ExactMeans(tilted, spec, coef), spec.feature_prefix),
      TruthMap(ExactMeans(base, spec, coef), spec.feature_prefix)};
}

Dataset CriteoLikeSynthetic(std::size_t n_control, std::size_t n_treatment,
                            std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n = n_control;
  spec.n_treatment = n_treatment;
  spec.feature_prefix = "f";
  spec.tilt.assign(12, -0.03);
  for (std::size_t d : {1, 4, 7, 10}) spec.tilt[d] = -0.08;
  spec.outcome_coef.assign(12, 0.3);
  spec.visit_threshold = 5.0;
  spec.conversion_threshold = 7.5;
  spec.seed = seed;
  const PlantedTilt data = GeneratePlantedTilt(spec);

  const auto schema = CriteoSchema();
  std::vector<std::vector<double>> cols(schema.size());
  auto append = [&](const Dataset& part, double treated) {
    for (std::size_t c = 0; c < schema.size(); ++c) {
      if (schema[c].name == "treatment") {
        cols[c].insert(cols[c].end(), part.n_rows(), treated);
      } else {
        const auto src = part.column(schema[c].name);
        cols[c].insert(cols[c].end(), src.begin(), src.end());
      }
    }
  };
  append(data.control, 0.0);
  append(data.treatment, 1.0);
  return Dataset(schema, std::move(cols));
}

}  // namespace scenic
