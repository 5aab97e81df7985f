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
#include "scenic/matching.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "scenic/errors.hpp"

namespace scenic {

namespace {

constexpr int kMaxIrlsIters = 100;
constexpr double kIrlsTol = 1e-8;
constexpr double kIrlsRidge = 1e-8;
// Standardized coefficients this large only arise from (quasi-)separation.
constexpr double kSeparationCoef = 30.0;

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

bool ConstantColumn(std::span<const double> col) {
  return std::all_of(col.begin(), col.end(),
                     [&](double v) { return v == col.front(); });
}

std::vector<std::string> ChooseFeatures(const Dataset& control,
                                        const Dataset& treatment,
                                        const std::vector<std::string>& requested,
                                        std::vector<std::string>& warnings) {
  std::vector<std::string> out;
  if (requested.empty()) {
    for (const auto& name : control.feature_names()) {
      if (!treatment.has_column(name) || !treatment.spec(name).is_feature()) continue;
      // A column constant inside each branch is a branch label, not a covariate.
      if (ConstantColumn(control.column(name)) &&
          ConstantColumn(treatment.column(name))) {
        warnings.push_back("skipped '" + name + "': constant within each branch");
        continue;
      }
      out.push_back(name);
    }
  } else {
    for (const auto& name : requested) {
      if (!control.has_column(name) || !treatment.has_column(name)) {
        throw DataError("propensity feature '" + name +
                        "' missing from one of the branches");
      }
      if (!control.spec(name).is_feature() || !treatment.spec(name).is_feature()) {
        warnings.push_back("dropped metric column '" + name +
                           "' from propensity features");
        continue;
      }
      out.push_back(name);
    }
  }
  if (out.empty()) throw DataError("no usable propensity features");
  return out;
}

}  // namespace

double PropensityModel::Score(std::span<const double> raw) const {
  if (raw.size() != coefficients.size()) {
    throw UsageError("feature vector length does not match the model");
  }
  double eta = intercept;
  for (std::size_t j = 0; j < raw.size(); ++j) {
    eta += coefficients[j] *
           (raw[j] - standardization[j].first) / standardization[j].second;
  }
  return Sigmoid(eta);
}

std::vector<double> PropensityModel::Scores(const Dataset& ds) const {
  std::vector<std::span<const double>> cols;
  for (const auto& f : features) cols.push_back(ds.column(f));
  std::vector<double> raw(features.size());
  std::vector<double> out(ds.n_rows());
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    for (std::size_t j = 0; j < cols.size(); ++j) raw[j] = cols[j][r];
    out[r] = Score(raw);
  }
  return out;
}

PropensityModel FitPropensity(const Dataset& control, const Dataset& treatment,
                              const std::vector<std::string>& features) {
  PropensityModel model;
  model.features = ChooseFeatures(control, treatment, features, model.warnings);
  const std::size_t nc = control.n_rows();
  const std::size_t nt = treatment.n_rows();
  if (nc < 2 || nt < 2) {
    throw DataError("propensity fit needs at least two rows per branch");
  }
  const std::size_t n = nc + nt;
  const std::size_t p = model.features.size();

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p + 1));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  x.col(0).setOnes();
  y.head(static_cast<Eigen::Index>(nc)).setZero();
  y.tail(static_cast<Eigen::Index>(nt)).setOnes();
  for (std::size_t j = 0; j < p; ++j) {
    const auto c = control.column(model.features[j]);
    const auto t = treatment.column(model.features[j]);
    double mean = 0.0;
    for (double v : c) mean += v;
    for (double v : t) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : c) ss += (v - mean) * (v - mean);
    for (double v : t) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) {
      throw DataError("propensity feature '" + model.features[j] +
                      "' has zero variance");
    }
    model.standardization.emplace_back(mean, sd);
    const auto col = static_cast<Eigen::Index>(j + 1);
    for (std::size_t r = 0; r < nc; ++r) {
      x(static_cast<Eigen::Index>(r), col) = (c[r] - mean) / sd;
    }
    for (std::size_t r = 0; r < nt; ++r) {
      x(static_cast<Eigen::Index>(nc + r), col) = (t[r] - mean) / sd;
    }
  }

  const auto dim = static_cast<Eigen::Index>(p + 1);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(dim);
  Eigen::MatrixXd info(dim, dim);
  for (int iter = 1; iter <= kMaxIrlsIters; ++iter) {
    model.iterations = iter;
    const Eigen::VectorXd eta = x * beta;
    Eigen::VectorXd prob(eta.size()), w(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      prob(i) = Sigmoid(eta(i));
      w(i) = prob(i) * (1.0 - prob(i));
    }
    info = x.transpose() * w.asDiagonal() * x;
    info.diagonal().array() += kIrlsRidge;
    const Eigen::VectorXd delta = info.ldlt().solve(x.transpose() * (y - prob));
    beta += delta;
    if (!beta.allFinite() || beta.cwiseAbs().maxCoeff() > kSeparationCoef) {
      model.separation = true;
      break;
    }
    if (delta.cwiseAbs().maxCoeff() < kIrlsTol) {
      model.converged = true;
      break;
    }
  }
  if (!model.converged && !model.separation) {
    // Slow divergence: every row already classified correctly.
    const Eigen::VectorXd eta = x * beta;
    bool perfect = true;
    for (Eigen::Index i = 0; i < eta.size() && perfect; ++i) {
      perfect = (eta(i) > 0.0) == (y(i) == 1.0);
    }
    model.separation = perfect;
  }
  if (model.separation) {
    model.warnings.push_back(
        "coefficients diverge: the features (nearly) separate the branches");
  } else if (!model.converged) {
    model.warnings.push_back("IRLS did not converge in " +
                             std::to_string(kMaxIrlsIters) + " iterations");
  }
  model.intercept = beta(0);
  model.coefficients.assign(beta.data() + 1, beta.data() + dim);
  if (beta.allFinite()) {
    const Eigen::MatrixXd cov = info.ldlt().solve(Eigen::MatrixXd::Identity(dim, dim));
    for (Eigen::Index j = 1; j < dim; ++j) {
      model.std_errors.push_back(std::sqrt(std::max(0.0, cov(j, j))));
    }
  } else {
    model.std_errors.assign(p, std::nan(""));
  }
  return model;
}

MatchResult GreedyMatchScores(std::span<const double> control_scores,
                              std::span<const double> treatment_scores,
                              std::optional<double> caliper) {
  if (control_scores.empty()) throw UsageError("empty control pool");
  if (caliper && !(*caliper >= 0.0)) throw UsageError("caliper must be >= 0");
  MatchResult out;
  out.caliper = caliper;

  const double n = static_cast<double>(control_scores.size() + treatment_scores.size());
  double mean = 0.0;
  for (double s : control_scores) mean += s;
  for (double s : treatment_scores) mean += s;
  mean /= n;
  double ss = 0.0;
  for (double s : control_scores) ss += (s - mean) * (s - mean);
  for (double s : treatment_scores) ss += (s - mean) * (s - mean);
  out.score_sd = n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  const double max_distance =
      caliper ? *caliper * out.score_sd : std::numeric_limits<double>::infinity();

  std::vector<std::size_t> order(treatment_scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return treatment_scores[a] > treatment_scores[b];
  });

  std::set<std::pair<double, std::size_t>> pool;
  for (std::size_t i = 0; i < control_scores.size(); ++i) {
    pool.emplace(control_scores[i], i);
  }
  for (std::size_t t : order) {
    if (pool.empty()) {
      ++out.unmatched_treatment;
      continue;
    }
    const double s = treatment_scores[t];
    auto above = pool.lower_bound({s, 0});
    auto best = pool.end();
    double best_dist = std::numeric_limits<double>::infinity();
    if (above != pool.end()) {
      best = above;
      best_dist = above->first - s;
    }
    if (above != pool.begin()) {
      // Lowest index among the entries sharing the nearest lower score.
      auto below = pool.lower_bound({std::prev(above)->first, 0});
      const double d = s - below->first;
      if (d < best_dist || (d == best_dist && below->second < best->second)) {
        best = below;
        best_dist = d;
      }
    }
    if (best_dist > max_distance) {
      ++out.unmatched_treatment;
      continue;
    }
    out.pairs.emplace_back(t, best->second);
    out.treatment_scores.push_back(s);
    out.control_scores.push_back(best->first);
    pool.erase(best);
  }
  return out;
}

MatchResult GreedyMatch(const PropensityModel& model, const Dataset& control,
                        const Dataset& treatment, std::optional<double> caliper,
                        bool accept_nonconverged) {
  if (!model.converged && !accept_nonconverged) {
    throw UsageError("propensity model did not converge");
  }
  const auto cs = model.Scores(control);
  const auto ts = model.Scores(treatment);
  return GreedyMatchScores(cs, ts, caliper);
}

double MatchedEstimate(const MatchResult& result, const Dataset& control,
                       const std::string& metric) {
  if (result.pairs.empty()) throw UsageError("no matched pairs");
  const auto t = control.column(metric);
  std::vector<std::size_t> rows;
  rows.reserve(result.pairs.size());
  for (const auto& [_, c] : result.pairs) rows.push_back(c);
  std::sort(rows.begin(), rows.end());
  double sum = 0.0;
  for (std::size_t r : rows) sum += t[r];
  return sum / static_cast<double>(rows.size());
}

}  // namespace scenic
