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
#include "scenic/maxent.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "dual_oracle.hpp"
#include "fixtures.hpp"

namespace scenic {
namespace {

using testing::Shoes;

CompiledConstraints Rows(std::vector<std::vector<double>> rows,
                         std::vector<double> targets,
                         std::vector<Relation> rels) {
  CompiledConstraints c;
  c.n_observations = rows.front().size();
  c.rows = std::move(rows);
  c.targets = std::move(targets);
  c.relations = std::move(rels);
  for (std::size_t k = 0; k < c.rows.size(); ++k) {
    c.labels.push_back("r" + std::to_string(k));
  }
  return c;
}

void ExpectSimplex(const std::vector<double>& w) {
  double s = 0.0;
  for (double v : w) {
    EXPECT_GE(v, 0.0);
    s += v;
  }
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(Entropy, KnownValues) {
  EXPECT_NEAR(Entropy(std::vector<double>(8, 0.125)), std::log(8.0), 1e-15);
  EXPECT_EQ(Entropy(std::vector<double>{0.0, 1.0, 0.0}), 0.0);
  EXPECT_NEAR(Entropy(std::vector<double>{0.25, 0.75}), 0.5623351446188083, 1e-12);
}

TEST(SolveEqualities, NoConstraintsIsUniform) {
  CompiledConstraints c;
  c.n_observations = 9;
  const SolverResult r = SolveEqualities(c);
  ASSERT_TRUE(r.converged());
  for (double w : r.weights) EXPECT_EQ(w, 1.0 / 9.0);
}

TEST(SolveEqualities, TwoPointTilt) {
  const SolverResult r = SolveEqualities(Rows({{0.0, 1.0}}, {0.75}, {Relation::kEq}));
  ASSERT_TRUE(r.converged());
  EXPECT_NEAR(r.weights[0], 0.25, 1e-9);
  EXPECT_NEAR(r.weights[1], 0.75, 1e-9);
  EXPECT_NEAR(r.eq_multipliers[0], std::log(3.0), 1e-7);
}

TEST(SolveEqualities, RejectsInequalities) {
  EXPECT_THROW(SolveEqualities(Rows({{0.0, 1.0}}, {0.5}, {Relation::kGe})),
               UsageError);
}

TEST(Solve, ShoeStoreDoubledMales) {
  const Dataset ds = Shoes();
  const SolverResult r = Solve(Compile(testing::ShoeScenario("double_males.json"), ds));
  ASSERT_TRUE(r.converged());
  ExpectSimplex(r.weights);
  const std::vector<double> expected = {1, 1, 2, 2, 2, 2, 1};
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_NEAR(7.0 * r.weights[i], 7.0 / 11.0 * expected[i], 1e-9);
  }
  EXPECT_NEAR(r.weights[2] / r.weights[0], 2.0, 1e-9);
}

TEST(Solve, BaselineTargetGivesUniform) {
  const Dataset ds = Shoes();
  ConstraintSpec c;
  c.feature = "age";
  c.target = {TargetMode::kMultipleOfBaseline, 1.0};
  const SolverResult r = Solve(Compile({c}, ds));
  ASSERT_TRUE(r.converged());
  for (double w : r.weights) EXPECT_NEAR(7.0 * w, 1.0, 1e-12);
  EXPECT_NEAR(r.eq_multipliers[0], 0.0, 1e-12);
}

TEST(Solve, MaleAgeAtLeast65Binds) {
  const Dataset ds = Shoes();
  const SolverResult r = Solve(Compile(testing::ShoeScenario("male_age_ge_65.json"), ds));
  ASSERT_TRUE(r.converged()) << ToString(r.status);
  ExpectSimplex(r.weights);
  const auto age = ds.column("age");
  const auto male = ds.column("is_male");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < 7; ++i) {
    num += r.weights[i] * male[i] * age[i];
    den += r.weights[i] * male[i];
  }
  EXPECT_NEAR(num / den, 65.0, 1e-6);
  EXPECT_GT(r.ineq_multipliers[1], 0.0);
  EXPECT_TRUE(r.active[1]);
  // Older males gain weight relative to younger ones.
  EXPECT_GT(r.weights[2], r.weights[3]);
  EXPECT_GT(r.weights[5], r.weights[4]);
  const auto oracle = testing::ProjectedGradientOracle(
      Compile(testing::ShoeScenario("male_age_ge_65.json"), ds));
  ASSERT_TRUE(oracle.converged);
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_NEAR(r.weights[i], oracle.weights[i], 1e-6);
  }
}

TEST(Solve, SlackInequalityStaysInactive) {
  const Dataset ds = Shoes();
  ConstraintSpec c;
  c.feature = "age";
  c.condition = "is_male";
  c.statistic = Statistic::kConditionalMean;
  c.relation = Relation::kGe;
  c.target = {TargetMode::kAbsolute, 60.0};
  const SolverResult r = Solve(Compile({c}, ds));
  ASSERT_TRUE(r.converged());
  for (double w : r.weights) EXPECT_NEAR(w, 1.0 / 7.0, 1e-15);
  EXPECT_EQ(r.ineq_multipliers[0], 0.0);
  EXPECT_FALSE(r.active[0]);
}

TEST(Solve, ContradictoryEqualitiesInfeasible) {
  const Dataset ds = Shoes();
  ConstraintSpec a;
  a.feature = "age";
  a.target = {TargetMode::kAbsolute, 90.0};
  ConstraintSpec b = a;
  b.target.value = 50.0;
  const SolverResult r = Solve(Compile({a, b}, ds));
  EXPECT_EQ(r.status, SolverStatus::kInfeasible);
  ASSERT_TRUE(r.infeasibility.has_value());
  EXPECT_EQ(r.infeasibility->evidence, InfeasibilityEvidence::kDualDivergence);
  EXPECT_EQ(r.infeasibility->offending_labels.size(), 2u);
  EXPECT_GT(r.infeasibility->dual_norm_at_stop, 1e6);
}

TEST(Solve, TargetOnHullBoundaryConcentrates) {
  const Dataset ds = Shoes();
  ConstraintSpec c;
  c.feature = "age";
  c.target = {TargetMode::kAbsolute, 97.0};
  const SolverResult r = Solve(Compile({c}, ds));
  // Either converged with a concentration warning, or clean max-iters; never
  // a silent wrong answer.
  if (r.converged()) {
    EXPECT_GT(r.weights[0], 0.999);
  } else {
    EXPECT_NE(r.status, SolverStatus::kInfeasible);
  }
}

TEST(Solve, DuplicateRowsMerged) {
  const auto c = Rows({{1, 2, 3, 4}, {1, 2, 3, 4}}, {3.0, 3.0},
                      {Relation::kEq, Relation::kEq});
  const SolverResult r = Solve(c);
  ASSERT_TRUE(r.converged());
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_NEAR(r.residuals[0], 0.0, 1e-9);
}

TEST(Solve, ScaleRobust) {
  const auto base = testing::RandomFeasibleInstance(17);
  auto scaled = base;
  for (std::size_t k = 0; k < scaled.size(); ++k) {
    for (auto& v : scaled.rows[k]) v *= 1000.0;
    scaled.targets[k] *= 1000.0;
  }
  const SolverResult a = Solve(base);
  const SolverResult b = Solve(scaled);
  ASSERT_TRUE(a.converged());
  ASSERT_TRUE(b.converged());
  for (std::size_t i = 0; i < a.weights.size(); ++i) {
    EXPECT_NEAR(a.weights[i], b.weights[i], 1e-9);
  }
}

TEST(Solve, UniformWithinGroups) {
  // Rows depend only on a 3-level group label.
  std::vector<double> g;
  for (int i = 0; i < 30; ++i) g.push_back(i % 3);
  std::vector<double> is2(30);
  for (int i = 0; i < 30; ++i) is2[i] = g[i] == 2 ? 1.0 : 0.0;
  const SolverResult r =
      Solve(Rows({g, is2}, {1.2, 0.5}, {Relation::kEq, Relation::kEq}));
  ASSERT_TRUE(r.converged());
  for (int i = 3; i < 30; ++i) EXPECT_NEAR(r.weights[i], r.weights[i % 3], 1e-15);
}

class OracleEquivalence : public ::testing::TestWithParam<int> {};

TEST_P(OracleEquivalence, MatchesProjectedGradient) {
  const auto cons = testing::RandomFeasibleInstance(1000 + GetParam());
  const SolverResult r = Solve(cons);
  ASSERT_TRUE(r.converged()) << ToString(r.status);
  ExpectSimplex(r.weights);
  const auto oracle = testing::ProjectedGradientOracle(cons);
  ASSERT_TRUE(oracle.converged);
  EXPECT_NEAR(r.entropy, oracle.entropy, 1e-6);
  for (std::size_t i = 0; i < r.weights.size(); ++i) {
    EXPECT_NEAR(r.weights[i], oracle.weights[i], 1e-4);
  }
  for (std::size_t k = 0; k < cons.size(); ++k) {
    const double tol = 1e-6 * std::max(1.0, std::abs(cons.targets[k]));
    if (cons.relations[k] == Relation::kEq) {
      EXPECT_LE(r.residuals[k], tol);
    } else {
      EXPECT_GE(r.residuals[k], -tol);
      if (!r.active[k]) EXPECT_EQ(r.ineq_multipliers[k], 0.0);
    }
  }
  EXPECT_LE(testing::MaxPerturbationGain(cons, r.active, r.weights, 200,
                                         GetParam()),
            1e-9);
}

INSTANTIATE_TEST_SUITE_P(Random, OracleEquivalence, ::testing::Range(0, 25));

TEST(Solve, RandomJointInfeasibilityDetected) {
  for (int i = 0; i < 20; ++i) {
    const SolverResult r = Solve(testing::RandomJointlyInfeasibleInstance(500 + i));
    EXPECT_EQ(r.status, SolverStatus::kInfeasible) << "case " << i;
  }
}

// Large N puts psi near log N, where a converging Newton step lowers psi by
// less than its rounding error. Such steps must still be taken.
TEST(Solve, ConvergesQuicklyOnLargeResamples) {
  const Dataset ds = Shoes();
  const Scenario resolved =
      ResolveTargets(testing::ShoeScenario("double_males.json"), ds);
  for (std::size_t i = 0; i < 10; ++i) {
    const Dataset sample =
        Resample(ds, {ResampleMode::kBootstrap, 10, 10000, 7}, i);
    const SolverResult r = Solve(Compile(resolved, sample));
    ASSERT_EQ(r.status, SolverStatus::kConverged) << "resample " << i;
    EXPECT_LE(r.iterations, 10);
    EXPECT_LE(std::abs(r.residuals[0]), 1e-9);
  }
}

TEST(SolverConfig, Validation) {
  SolverConfig cfg;
  cfg.grad_tol = 2.0;
  EXPECT_THROW(cfg.Validate(), UsageError);
  cfg = SolverConfig{};
  cfg.divergence_norm = 0.5;
  EXPECT_THROW(cfg.Validate(), UsageError);
}

}  // namespace
}  // namespace scenic
