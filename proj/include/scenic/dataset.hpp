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
#ifndef SCENIC_DATASET_HPP_
#define SCENIC_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace scenic {

enum class ColumnKind { kNumericFeature, kIndicatorFeature, kMetric };

std::string ToString(ColumnKind kind);
ColumnKind ParseColumnKind(std::string_view text);

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kNumericFeature;
  std::string units;

  bool is_feature() const { return kind != ColumnKind::kMetric; }
};

// Immutable column-major table of N observations. Indicator columns hold
// only 0/1, every entry is finite, and there is at least one metric column.
class Dataset {
 public:
  Dataset(std::vector<ColumnSpec> specs,
          std::vector<std::vector<double>> columns);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_columns() const { return specs_.size(); }
  std::size_t n_features() const;

  const std::vector<ColumnSpec>& specs() const { return specs_; }
  const ColumnSpec& spec(std::string_view name) const;
  bool has_column(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;

  std::span<const double> column(std::string_view name) const;
  std::span<const double> column(std::size_t index) const;

  std::vector<std::string> feature_names() const;
  std::vector<std::string> metric_names() const;

  // New dataset made of the given source rows, in order (repeats allowed).
  Dataset take(std::span<const std::size_t> rows) const;

  // Rows where the indicator column equals `value`.
  Dataset filter(std::string_view indicator, double value) const;

  // Copy with one extra column appended.
  Dataset with_column(ColumnSpec spec, std::vector<double> values) const;

  // FNV-1a over column names, kinds and raw values. Stable across runs.
  std::uint64_t digest() const;

 private:
  std::vector<ColumnSpec> specs_;
  std::vector<std::vector<double>> columns_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t n_rows_ = 0;
};

// --- schema and CSV -------------------------------------------------------

// `{"columns":[{"name":"age","kind":"numeric-feature","units":"years"},...]}`
std::vector<ColumnSpec> ParseSchema(std::string_view json_text);
std::vector<ColumnSpec> LoadSchema(const std::string& path);
std::string SchemaToJson(const std::vector<ColumnSpec>& schema);

// Header must list exactly the schema names in order. Errors name the 1-based
// data row and the column.
Dataset ReadCsv(std::istream& in, const std::vector<ColumnSpec>& schema);
Dataset LoadCsv(const std::string& path, const std::vector<ColumnSpec>& schema);

void WriteCsv(const Dataset& ds, std::ostream& out);
void WriteCsv(const Dataset& ds, const std::string& path);

// Criteo uplift layout: f0..f11 numeric, treatment indicator, visit and
// conversion metrics. Extra columns (e.g. exposure) are ignored and header
// order is free. `max_rows` = 0 reads everything.
std::vector<ColumnSpec> CriteoSchema();
Dataset LoadCriteo(const std::string& path, std::size_t max_rows = 0);

// --- resampling -----------------------------------------------------------

enum class ResampleMode { kBootstrap, kDisjointSubsets };

struct ResamplePlan {
  ResampleMode mode = ResampleMode::kBootstrap;
  std::size_t B = 199;
  std::size_t m = 10000;
  std::uint64_t seed = 0;

  // Throws UsageError when the plan cannot be applied to n rows.
  void Validate(std::size_t n_rows) const;
};

// Seed for resample `index`, derived so every index gets its own stream.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index);

std::vector<std::size_t> ResampleIndices(std::size_t n_rows,
                                         const ResamplePlan& plan,
                                         std::size_t index);
Dataset Resample(const Dataset& ds, const ResamplePlan& plan,
                 std::size_t index);

// Unweighted means; with `condition` only rows where the indicator is 1.
std::map<std::string, double> ColumnMeans(
    const Dataset& ds, const std::vector<std::string>& columns,
    const std::optional<std::string>& condition = std::nullopt);

// --- planted-tilt synthetic data ------------------------------------------

struct MixtureComponent {
  double weight = 1.0;
  std::vector<double> mean;
  std::vector<double> sd;
};

// Control rows come from a Gaussian mixture; treatment rows from the same
// mixture reweighted by exp(tilt . x). Metrics:
//   t          = coef . x + noise
//   visit      = 1{coef . x + noise > visit_threshold}
//   conversion = 1{coef . x + noise > conversion_threshold}
struct SyntheticSpec {
  std::size_t n = 10000;
  std::size_t n_treatment = 0;  // 0: same as n
  std::vector<double> tilt;
  std::vector<MixtureComponent> base;  // empty: default two-component mix
  std::vector<double> outcome_coef;    // empty: all ones
  double noise_sd = 1.0;
  double visit_threshold = 1.0;
  double conversion_threshold = 3.0;
  std::string feature_prefix = "x";
  std::uint64_t seed = 0;
};

struct PlantedTilt {
  Dataset control;
  Dataset treatment;
  // Exact means under the tilted distribution, for every feature and metric.
  std::map<std::string, double> truth;
  // Exact means under the base distribution.
  std::map<std::string, double> base_truth;
};

std::vector<MixtureComponent> DefaultMixture(std::size_t dims);

PlantedTilt GeneratePlantedTilt(const SyntheticSpec& spec);

// Criteo-shaped fixture: both branches in one table with a treatment column.
Dataset CriteoLikeSynthetic(std::size_t n_control, std::size_t n_treatment,
                            std::uint64_t seed);

}  // namespace scenic

#endif  // SCENIC_DATASET_HPP_
