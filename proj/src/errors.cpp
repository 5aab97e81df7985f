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
#include "scenic/errors.hpp"

#include <utility>

namespace scenic {

std::string ToString(InfeasibilityEvidence evidence) {
  switch (evidence) {
    case InfeasibilityEvidence::kRangeViolation:
      return "range-violation";
    case InfeasibilityEvidence::kDualDivergence:
      return "dual-divergence";
  }
  return "unknown";
}

namespace {

std::string Describe(const InfeasibilityReport& report) {
  std::string msg = "infeasible scenario (" + ToString(report.evidence) + ")";
  if (!report.offending_labels.empty()) {
    msg += ": ";
    for (std::size_t i = 0; i < report.offending_labels.size(); ++i) {
      if (i > 0) msg += "; ";
      msg += report.offending_labels[i];
    }
  }
  if (!report.detail.empty()) msg += " [" + report.detail + "]";
  return msg;
}

}  // namespace

InfeasibleScenario::InfeasibleScenario(InfeasibilityReport report)
    : std::runtime_error(Describe(report)), report_(std::move(report)) {}

}  // namespace scenic
