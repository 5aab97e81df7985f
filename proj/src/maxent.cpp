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
// Maximum-entropy weights through the convex dual.
//
// For equality rows c_k = (a_k - b_k) / s_k the weights are w_n ∝ exp(λ·c_n)
// and λ minimizes the log-partition ψ(λ) = ln Σ_n exp(λ·c_n). ψ is smooth and
// convex with gradient E_w[c] and Hessian Cov_w[c], so damped Newton converges
// quadratically once close. When the targets sit outside the convex hull of
// the rows, ψ is unbounded below and λ runs off to infinity; that divergence
// is the infeasibility certificate.
//
// Inequalities are handled by an active-set loop that repeatedly solves the
// equality problem on {equalities} ∪ {active inequalities}.

#include "scenic/maxent.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace scenic {

std::string ToString(SolverStatus status) {
  switch (status) {
    case SolverStatus::kConverged:
      return "converged";
    case SolverStatus::kInfeasible:
      return "infeasible";
    case SolverStatus::kMaxIters:
      return "max-iters";
  }
  return "unknown";
}

void SolverConfig::Validate() const {
  if (max_newton_iters <= 0 || !(grad_tol > 0.0) || !(grad_tol < 1.0) ||
      !(hessian_ridge > 0.0) || !(backtrack_factor > 0.0) ||
      !(backtrack_factor < 1.0) || !(sufficient_decrease > 0.0) ||
      max_halvings <= 0 || !(divergence_norm > 1.0) ||
      active_set_max_passes == 0) {
    throw UsageError("invalid solver configuration");
  }
}

double Entropy(std::span<const double> weights) {
  double h = 0.0;
  for (double w : weights) {
    if (w > 0.0) h -= w * std::log(w);
  }
  return h;
}

namespace {

// Tolerances on the converged solution, in the units of the compiled rows.
constexpr double kResidualTol = 1e-6;
constexpr double kActivationTol = 1e-9;  // standardized slack
constexpr double kMultiplierTol = 1e-8;  // standardized multiplier
constexpr double kConcentrationNorm = 50.0;
// Relative size of a psi decrease that double rounding can no longer resolve.
constexpr double kRoundoffDecrease = 1e-12;

double LogSumExp(const Eigen::VectorXd& z) {
  const double mx = z.maxCoeff();
  return mx + std::log((z.array() - mx).exp().sum());
}

struct Standardized {
  std::vector<double> scale;  // s_k > 0 per compiled row
};

Standardized RowScales(const CompiledConstraints& cons) {
  Standardized out;
  for (std::size_t k = 0; k < cons.size(); ++k) {
    const auto& row = cons.rows[k];
    const double n = static_cast<double>(row.size());
    const double mean = std::accumulate(row.begin(), row.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : row) ss += (v - mean) * (v - mean);
    double s = std::sqrt(ss / n);
    if (!(s > 0.0) || !std::isfinite(s)) {
      s = std::max(1.0, std::abs(mean - cons.targets[k]));
    }
    out.scale.push_back(s);
  }
  return out;
}

struct DualSolution {
  Eigen::VectorXd lambda;  // standardized, one per used row
  std::vector<double> weights;
  int iterations = 0;
  SolverStatus status = SolverStatus::kMaxIters;
  double dual_norm = 0.0;
};

// Damped Newton on ψ for the K x N matrix of standardized rows.
DualSolution NewtonDual(const Eigen::MatrixXd& rows, const Eigen::VectorXd& tol,
                        const SolverConfig& cfg) {
  const Eigen::Index k = rows.rows();
  const Eigen::Index n = rows.cols();
  DualSolution sol;
  sol.lambda = Eigen::VectorXd::Zero(k);

  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w(n);
  double psi = LogSumExp(z);
  auto finish = [&](SolverStatus status) {
    sol.status = status;
    sol.dual_norm = sol.lambda.norm();
    w = (z.array() - psi).exp();
    const double total = w.sum();
    sol.weights.assign(w.data(), w.data() + n);
    for (auto& v : sol.weights) v /= total;
    return sol;
  };

  for (int iter = 0; iter <= cfg.max_newton_iters; ++iter) {
    sol.iterations = iter;
    w = (z.array() - psi).exp();
    const Eigen::VectorXd grad = rows * w;
    if ((grad.array().abs() <= tol.array()).all()) {
      return finish(SolverStatus::kConverged);
    }
    if (sol.lambda.norm() > cfg.divergence_norm) {
      return finish(SolverStatus::kInfeasible);
    }
    if (iter == cfg.max_newton_iters) break;

    Eigen::MatrixXd hess = rows * w.asDiagonal() * rows.transpose();
    hess -= grad * grad.transpose();
    hess.diagonal().array() += cfg.hessian_ridge;
    Eigen::VectorXd step = hess.ldlt().solve(-grad);
    double slope = grad.dot(step);
    if (!std::isfinite(slope) || slope >= 0.0) {
      step = -grad;
      slope = -grad.squaredNorm();
    }
    const Eigen::VectorXd dz = rows.transpose() * step;
    // Near the optimum the predicted decrease of psi drops below its rounding
    // error and the Armijo test turns into noise. Judge steps by the gradient
    // norm there instead.
    const bool roundoff = -slope < kRoundoffDecrease * std::max(1.0, std::abs(psi));
    const double grad_norm = grad.norm();
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= cfg.max_halvings; ++h) {
      const Eigen::VectorXd trial = z + t * dz;
      const double psi_trial = LogSumExp(trial);
      bool ok = std::isfinite(psi_trial);
      if (ok && roundoff) {
        const Eigen::VectorXd w_trial = (trial.array() - psi_trial).exp();
        ok = (rows * w_trial).norm() < grad_norm;
      } else if (ok) {
        ok = psi_trial <= psi + cfg.sufficient_decrease * t * slope;
      }
      if (ok) {
        z = trial;
        psi = psi_trial;
        sol.lambda += t * step;
        accepted = true;
        break;
      }
      t *= cfg.backtrack_factor;
    }
    if (!accepted) break;  // no further progress possible
  }
  return finish(SolverStatus::kMaxIters);
}

// Per-row gradient tolerance in standardized units. Never looser than
// grad_tol, and tight enough that the original residual is below
// grad_tol * max(1, |b|).
double RowTolerance(double target, double scale, const SolverConfig& cfg) {
  return cfg.grad_tol * std::min(1.0, std::max(1.0, std::abs(target)) / scale);
}

struct SubsetSolve {
  DualSolution dual;
  std::vector<double> lambda_per_row;  // standardized; 0 for merged rows
  std::vector<std::string> warnings;
};

// Solves the equality problem on the given compiled rows. Rows identical (or
// negated) after standardization are merged.
SubsetSolve SolveSubset(const CompiledConstraints& cons, const Standardized& st,
                        const std::vector<std::size_t>& subset,
                        const SolverConfig& cfg) {
  const std::size_t n = cons.n_rows();
  SubsetSolve out;
  out.lambda_per_row.assign(cons.size(), 0.0);

  std::vector<std::vector<double>> kept_rows;
  std::vector<std::size_t> kept_index;
  std::vector<double> kept_tol;
  for (std::size_t k : subset) {
    std::vector<double> c(n);
    for (std::size_t r = 0; r < n; ++r) {
      c[r] = (cons.rows[k][r] - cons.targets[k]) / st.scale[k];
    }
    bool duplicate = false;
    for (std::size_t j = 0; j < kept_rows.size() && !duplicate; ++j) {
      const auto& other = kept_rows[j];
      const bool same = std::equal(c.begin(), c.end(), other.begin());
      const bool negated = std::equal(c.begin(), c.end(), other.begin(),
                                      [](double x, double y) { return x == -y; });
      if (same || negated) {
        duplicate = true;
        out.warnings.push_back("duplicate constraint rows merged: '" +
                               cons.labels[k] + "' and '" +
                               cons.labels[kept_index[j]] + "'");
      }
    }
    if (duplicate) continue;
    kept_rows.push_back(std::move(c));
    kept_index.push_back(k);
    kept_tol.push_back(RowTolerance(cons.targets[k], st.scale[k], cfg));
  }

  const auto kk = static_cast<Eigen::Index>(kept_rows.size());
  if (kk == 0) {
    out.dual.lambda = Eigen::VectorXd::Zero(0);
    out.dual.weights.assign(n, 1.0 / static_cast<double>(n));
    out.dual.status = SolverStatus::kConverged;
    return out;
  }
  Eigen::MatrixXd rows(kk, static_cast<Eigen::Index>(n));
  Eigen::VectorXd tol(kk);
  for (Eigen::Index j = 0; j < kk; ++j) {
    rows.row(j) = Eigen::Map<const Eigen::RowVectorXd>(
        kept_rows[j].data(), static_cast<Eigen::Index>(n));
    tol(j) = kept_tol[j];
  }
  out.dual = NewtonDual(rows, tol, cfg);
  for (Eigen::Index j = 0; j < kk; ++j) {
    out.lambda_per_row[kept_index[j]] = out.dual.lambda(j);
  }
  return out;
}

double WeightedRowMean(const std::vector<double>& row,
                       const std::vector<double>& weights) {
  double s = 0.0;
  for (std::size_t r = 0; r < row.size(); ++r) s += weights[r] * row[r];
  return s;
}

// Signed slack: positive when the row is satisfied with room to spare.
double Slack(Relation rel, double value, double target) {
  switch (rel) {
    case Relation::kGe:
      return value - target;
    case Relation::kLe:
      return target - value;
    case Relation::kEq:
      return -std::abs(value - target);
  }
  return 0.0;
}

SolverResult Assemble(const CompiledConstraints& cons, const Standardized& st,
                      SubsetSolve solved, const std::vector<bool>& active) {
  SolverResult res;
  const std::size_t k = cons.size();
  res.weights = std::move(solved.dual.weights);
  res.entropy = Entropy(res.weights);
  res.iterations = solved.dual.iterations;
  res.status = solved.dual.status;
  res.labels = cons.labels;
  res.relations = cons.relations;
  res.active = active;
  res.warnings = std::move(solved.warnings);
  res.eq_multipliers.assign(k, 0.0);
  res.ineq_multipliers.assign(k, 0.0);
  res.residuals.assign(k, 0.0);
  double max_lambda = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double lam = solved.lambda_per_row[i];
    max_lambda = std::max(max_lambda, std::abs(lam));
    const double value = WeightedRowMean(cons.rows[i], res.weights);
    switch (cons.relations[i]) {
      case Relation::kEq:
        res.eq_multipliers[i] = lam / st.scale[i];
        res.residuals[i] = std::abs(value - cons.targets[i]);
        break;
      case Relation::kGe:
        res.ineq_multipliers[i] = std::max(0.0, lam) / st.scale[i];
        res.residuals[i] = value - cons.targets[i];
        break;
      case Relation::kLe:
        res.ineq_multipliers[i] = std::max(0.0, -lam) / st.scale[i];
        res.residuals[i] = cons.targets[i] - value;
        break;
    }
  }
  if (res.status == SolverStatus::kInfeasible) {
    InfeasibilityReport report;
    report.evidence = InfeasibilityEvidence::kDualDivergence;
    report.dual_norm_at_stop = solved.dual.dual_norm;
    for (std::size_t i = 0; i < k; ++i) {
      if (std::abs(solved.lambda_per_row[i]) >= 1e-3 * max_lambda) {
        report.offending_labels.push_back(cons.labels[i]);
      }
    }
    report.detail = "dual multipliers diverged; targets lie outside the "
                    "convex hull of the constraint rows";
    res.infeasibility = std::move(report);
  } else if (res.status == SolverStatus::kConverged) {
    for (std::size_t i = 0; i < k; ++i) {
      const double tol = kResidualTol * std::max(1.0, std::abs(cons.targets[i]));
      const bool ok = cons.relations[i] == Relation::kEq
                          ? res.residuals[i] <= tol
                          : res.residuals[i] >= -tol;
      if (!ok) {
        res.status = SolverStatus::kMaxIters;
        res.warnings.push_back("constraint '" + cons.labels[i] +
                               "' not met to tolerance");
      }
    }
    if (max_lambda > kConcentrationNorm) {
      res.warnings.push_back(
          "weights concentrated on a face of the constraint hull; targets are "
          "at or near the edge of what the data can reach");
    }
  }
  return res;
}

void CheckShape(const CompiledConstraints& cons) {
  const std::size_t k = cons.rows.size();
  if (cons.targets.size() != k || cons.relations.size() != k ||
      cons.labels.size() != k) {
    throw UsageError("compiled constraints have inconsistent sizes");
  }
  if (cons.n_rows() == 0) throw UsageError("constraints cover no observations");
  for (const auto& row : cons.rows) {
    if (row.size() != cons.n_rows()) {
      throw UsageError("compiled constraint rows must share a non-zero length");
    }
    for (double v : row) {
      if (!std::isfinite(v)) throw UsageError("non-finite constraint row entry");
    }
  }
}

SolverResult UniformResult(const CompiledConstraints& cons) {
  SolverResult res;
  res.status = SolverStatus::kConverged;
  const std::size_t n = cons.n_rows();
  res.weights.assign(n, 1.0 / static_cast<double>(n));
  res.entropy = Entropy(res.weights);
  return res;
}

}  // namespace

SolverResult SolveEqualities(const CompiledConstraints& cons,
                             const SolverConfig& cfg) {
  cfg.Validate();
  CheckShape(cons);
  for (Relation r : cons.relations) {
    if (r != Relation::kEq) {
      throw UsageError("SolveEqualities accepts equality rows only");
    }
  }
  if (cons.empty()) return UniformResult(cons);
  const Standardized st = RowScales(cons);
  std::vector<std::size_t> all(cons.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return Assemble(cons, st, SolveSubset(cons, st, all, cfg),
                  std::vector<bool>(cons.size(), true));
}

SolverResult Solve(const CompiledConstraints& cons, const SolverConfig& cfg) {
  cfg.Validate();
  CheckShape(cons);
  if (cons.empty()) return UniformResult(cons);
  const Standardized st = RowScales(cons);
  const std::size_t k = cons.size();
  std::vector<std::size_t> ineq;
  for (std::size_t i = 0; i < k; ++i) {
    if (cons.relations[i] != Relation::kEq) ineq.push_back(i);
  }
  const int max_passes = cfg.active_set_max_passes > 0
                             ? cfg.active_set_max_passes
                             : static_cast<int>(2 * ineq.size() + 2);

  std::vector<bool> active(k, false);
  for (std::size_t i = 0; i < k; ++i) active[i] = cons.relations[i] == Relation::kEq;
  int total_iterations = 0;

  for (int pass = 0; pass < max_passes; ++pass) {
    std::vector<std::size_t> subset;
    for (std::size_t i = 0; i < k; ++i) {
      if (active[i]) subset.push_back(i);
    }
    SubsetSolve solved = SolveSubset(cons, st, subset, cfg);
    total_iterations += solved.dual.iterations;
    if (solved.dual.status != SolverStatus::kConverged) {
      SolverResult res = Assemble(cons, st, std::move(solved), active);
      res.iterations = total_iterations;
      return res;
    }

    // Most violated inactive inequality.
    std::size_t worst = k;
    double worst_slack = -kActivationTol;
    for (std::size_t i : ineq) {
      if (active[i]) continue;
      const double value = WeightedRowMean(cons.rows[i], solved.dual.weights);
      const double slack =
          Slack(cons.relations[i], value, cons.targets[i]) / st.scale[i];
      if (slack < worst_slack) {
        worst_slack = slack;
        worst = i;
      }
    }
    if (worst < k) {
      active[worst] = true;
      continue;
    }
    // Active inequality pulling the wrong way.
    std::size_t wrong = k;
    double wrong_mu = -kMultiplierTol;
    for (std::size_t i : ineq) {
      if (!active[i]) continue;
      const double lam = solved.lambda_per_row[i];
      const double mu = cons.relations[i] == Relation::kGe ? lam : -lam;
      if (mu < wrong_mu) {
        wrong_mu = mu;
        wrong = i;
      }
    }
    if (wrong < k) {
      active[wrong] = false;
      continue;
    }
    SolverResult res = Assemble(cons, st, std::move(solved), active);
    res.iterations = total_iterations;
    return res;
  }

  std::vector<std::size_t> subset;
  for (std::size_t i = 0; i < k; ++i) {
    if (active[i]) subset.push_back(i);
  }
  SolverResult res = Assemble(cons, st, SolveSubset(cons, st, subset, cfg), active);
  res.iterations = total_iterations;
  res.status = SolverStatus::kMaxIters;
  res.infeasibility.reset();
  res.warnings.push_back("active-set loop did not settle within " +
                         std::to_string(max_passes) + " passes");
  return res;
}

}  // namespace scenic
