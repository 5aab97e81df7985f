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
#include "scenic/diagnostics.hpp"

#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"

namespace scenic {
namespace {

TEST(Diagnostics, UniformWeights) {
  const WeightDiagnostics d = DiagnoseWeights(std::vector<double>(1000, 1e-3));
  EXPECT_NEAR(d.ess, 1000.0, 1e-9);
  EXPECT_NEAR(d.ess_ratio, 1.0, 1e-12);
  EXPECT_NEAR(d.entropy_ratio, 1.0, 1e-12);
  EXPECT_EQ(d.outlier_count, 0u);
  EXPECT_TRUE(d.warnings.empty());
}

TEST(Diagnostics, ShoeStoreDoubledMales) {
  const Dataset ds = testing::Shoes();
  const SolverResult r =
      Solve(Compile(testing::ShoeScenario("double_males.json"), ds));
  const WeightDiagnostics d = Diagnose(r);
  EXPECT_NEAR(d.max, 14.0 / 11.0, 1e-9);
  EXPECT_NEAR(d.min, 7.0 / 11.0, 1e-9);
  // Four weights of 2/11 and three of 1/11: sum of squares 19/121.
  EXPECT_NEAR(d.ess, 121.0 / 19.0, 1e-9);
  EXPECT_EQ(d.outlier_count, 0u);
}

TEST(Diagnostics, ConcentratedWeights) {
  std::vector<double> w(10, 0.01);
  w[0] = 0.91;
  const WeightDiagnostics d = DiagnoseWeights(w, 5.0);
  EXPECT_EQ(d.outlier_count, 1u);
  EXPECT_NEAR(d.ess, 1.0 / (0.91 * 0.91 + 9 * 1e-4), 1e-12);
  EXPECT_NEAR(d.ess, 1.207, 1e-3);
  EXPECT_FALSE(d.warnings.empty());
}

TEST(Diagnostics, RejectsNonConverged) {
  SolverResult r;
  r.status = SolverStatus::kInfeasible;
  r.weights = {0.5, 0.5};
  EXPECT_THROW(Diagnose(r), UsageError);
}

TEST(Diagnostics, EssPermutationInvariantAndMajorization) {
  std::vector<double> w = {0.1, 0.2, 0.3, 0.4};
  std::vector<double> p = {0.4, 0.1, 0.3, 0.2};
  EXPECT_DOUBLE_EQ(DiagnoseWeights(w).ess, DiagnoseWeights(p).ess);
  // Moving mass from a small weight to the largest one majorizes.
  std::vector<double> c = {0.05, 0.2, 0.3, 0.45};
  EXPECT_LE(DiagnoseWeights(c).entropy_ratio, DiagnoseWeights(w).entropy_ratio);
}

TEST(Boxplot, HandValues) {
  const BoxplotStats b = ComputeBoxplot(std::vector<double>{1, 2, 3, 4, 5, 6, 7}, "a");
  EXPECT_DOUBLE_EQ(b.median, 4.0);
  EXPECT_DOUBLE_EQ(b.q1, 2.5);
  EXPECT_DOUBLE_EQ(b.q3, 5.5);
  EXPECT_DOUBLE_EQ(b.whisker_low, 1.0);
  EXPECT_DOUBLE_EQ(b.whisker_high, 7.0);
  EXPECT_TRUE(b.outliers.empty());

  const BoxplotStats c = ComputeBoxplot(std::vector<double>(4, 2.0), "c");
  EXPECT_EQ(c.q1, c.q3);
  EXPECT_TRUE(c.outliers.empty());

  const BoxplotStats o = ComputeBoxplot(std::vector<double>{1, 1, 1, 1, 100}, "o");
  ASSERT_EQ(o.outliers.size(), 1u);
  EXPECT_EQ(o.outliers[0], 100.0);
  EXPECT_EQ(o.whisker_high, 1.0);
  EXPECT_THROW(ComputeBoxplot(std::vector<double>{}, "e"), UsageError);
}

TEST(SpreadCurve, WidensWithMultiple) {
  SyntheticSpec spec;
  spec.n = 5000;
  spec.tilt = {0.0, 0.0, 0.0, 0.0};
  spec.base = {{1.0, {10, 10, 10, 10}, {2, 2, 2, 2}}};
  const PlantedTilt data = GeneratePlantedTilt(spec);
  const auto points =
      SpreadCurve(data.control, {"x0", "x1", "x2", "x3"}, {1.0, 1.04, 1.08, 1.12});
  ASSERT_EQ(points.size(), 4u);
  ASSERT_TRUE(points[0].boxplot);
  EXPECT_NEAR(points[0].boxplot->q1, 1.0, 1e-12);
  EXPECT_NEAR(points[0].boxplot->q3, 1.0, 1e-12);
  EXPECT_NEAR(points[0].boxplot->whisker_high, 1.0, 1e-12);
  double prev_iqr = 0.0;
  for (const auto& p : points) {
    ASSERT_TRUE(p.boxplot) << p.note;
    const double iqr = p.boxplot->q3 - p.boxplot->q1;
    EXPECT_GE(iqr, prev_iqr);
    prev_iqr = iqr;
  }
}

TEST(SpreadCurve, FarMultipleRecordedInfeasible) {
  const Dataset ds = testing::Shoes();
  const auto points = SpreadCurve(ds, {"age"}, {1.0, 5.0});
  EXPECT_EQ(points[1].status, SolverStatus::kInfeasible);
  EXPECT_FALSE(points[1].boxplot);
  EXPECT_THROW(SpreadCurve(ds, {"is_male"}, {1.0}), ScenarioError);
}

}  // namespace
}  // namespace scenic
