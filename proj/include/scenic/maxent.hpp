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
#ifndef SCENIC_MAXENT_HPP_
#define SCENIC_MAXENT_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scenic/errors.hpp"
#include "scenic/scenario.hpp"

namespace scenic {

struct SolverConfig {
  int max_newton_iters = 200;
  double grad_tol = 1e-9;
  double hessian_ridge = 1e-10;
  double backtrack_factor = 0.5;
  double sufficient_decrease = 1e-4;
  int max_halvings = 50;
  double divergence_norm = 1e6;
  // Negative: 2 * (number of inequality rows) + 2.
  int active_set_max_passes = -1;

  void Validate() const;
};

enum class SolverStatus { kConverged, kInfeasible, kMaxIters };

std::string ToString(SolverStatus status);

struct SolverResult {
  std::vector<double> weights;
  // One entry per compiled row, zero for rows of the other kind.
  std::vector<double> eq_multipliers;
  std::vector<double> ineq_multipliers;
  double entropy = 0.0;
  // |sum w a - b| for equalities, signed slack (>= 0 when satisfied) for
  // inequalities.
  std::vector<double> residuals;
  std::vector<std::string> labels;
  std::vector<Relation> relations;
  std::vector<bool> active;
  int iterations = 0;
  SolverStatus status = SolverStatus::kMaxIters;
  std::optional<InfeasibilityReport> infeasibility;
  std::vector<std::string> warnings;

  bool converged() const { return status == SolverStatus::kConverged; }
};

// -sum w ln w with 0 ln 0 = 0, in nats.
double Entropy(std::span<const double> weights);

// Maximum-entropy weights under equality rows only (damped Newton on the
// log-partition dual). Throws UsageError if any row is an inequality.
SolverResult SolveEqualities(const CompiledConstraints& constraints,
                             const SolverConfig& config = {});

// Mixed equality/inequality rows via an active-set loop over the
// inequalities.
SolverResult Solve(const CompiledConstraints& constraints,
                   const SolverConfig& config = {});

}  // namespace scenic

#endif  // SCENIC_MAXENT_HPP_
