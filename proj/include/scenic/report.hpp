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
#ifndef SCENIC_REPORT_HPP_
#define SCENIC_REPORT_HPP_

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "scenic/diagnostics.hpp"
#include "scenic/estimate.hpp"
#include "scenic/matching.hpp"
#include "scenic/maxent.hpp"
#include "scenic/sweep.hpp"

namespace scenic {

using Json = nlohmann::ordered_json;

std::uint64_t Fnv1a(std::string_view bytes);
std::string HexDigest(std::uint64_t digest);

// Identifies a run: what data, which scenario, which seed.
struct Provenance {
  std::uint64_t dataset_digest = 0;
  std::uint64_t scenario_digest = 0;
  std::uint64_t seed = 0;
};

Provenance MakeProvenance(const Dataset& ds, const Scenario& scenario,
                          std::uint64_t seed);

Json ToJson(const Provenance& p);
Json ToJson(const InfeasibilityReport& r);
Json ToJson(const SolverResult& r, bool include_weights = false);
Json ToJson(const PointEstimate& e);
Json ToJson(const Summary& s);
Json ToJson(const BootstrapDistribution& d);
Json ToJson(const WeightDiagnostics& d, bool include_weights = false);
Json ToJson(const BoxplotStats& b);
Json ToJson(const SpreadPoint& p);
Json ToJson(const SweepResult& r);
Json ToJson(const ExchangeRate& e);
Json ToJson(const PropensityModel& m);
// Pairs are (treatment row, control row); the list is omitted by default.
Json ToJson(const MatchResult& m, bool include_pairs = false);
Json ToJson(const ColumnSpec& c);

// --- CSV exports ----------------------------------------------------------

// row, weight, relative_weight
void WriteWeightsCsv(std::ostream& out, std::span<const double> weights);
// resample, then one column per metric; failed resamples are left out.
void WriteValuesCsv(std::ostream& out,
                    const std::vector<BootstrapDistribution>& dists);
// label, q1, median, q3, lo, hi, outliers (space separated)
void WriteBoxplotCsv(std::ostream& out, const std::vector<BoxplotStats>& boxes);
// Long form: axis values, median, sd, q05, q95, infeasible_fraction.
void WriteSweepCsv(std::ostream& out, const SweepResult& r);
// treatment_row, control_row, treatment_score, control_score
void WritePairsCsv(std::ostream& out, const MatchResult& m);
// Histogram bins of several named distributions.
void WriteHistogramCsv(std::ostream& out,
                       const std::vector<BootstrapDistribution>& dists);

// Shortest decimal text that round-trips to the same double.
std::string FormatDouble(double v);

}  // namespace scenic

#endif  // SCENIC_REPORT_HPP_
