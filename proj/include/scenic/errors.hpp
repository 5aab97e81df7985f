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
#ifndef SCENIC_ERRORS_HPP_
#define SCENIC_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <vector>

namespace scenic {

// Problems with input tables: missing files, bad cells, unknown columns.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed scenario documents or constraint specs that do not fit the data.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments to an operation (bad plan, bad index, empty input).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class InfeasibilityEvidence { kRangeViolation, kDualDivergence };

std::string ToString(InfeasibilityEvidence evidence);

struct InfeasibilityReport {
  std::vector<std::string> offending_labels;
  InfeasibilityEvidence evidence = InfeasibilityEvidence::kRangeViolation;
  double dual_norm_at_stop = 0.0;
  std::string detail;
};

// Thrown when a scenario can be shown to have no feasible weights.
class InfeasibleScenario : public std::runtime_error {
 public:
  explicit InfeasibleScenario(InfeasibilityReport report);

  const InfeasibilityReport& report() const { return report_; }

 private:
  InfeasibilityReport report_;
};

}  // namespace scenic

#endif  // SCENIC_ERRORS_HPP_
