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
// Monte-Carlo reference for planted-tilt ground truth: sample the base
// mixture, attach exp(tilt . x) importance weights, average.
#ifndef SCENIC_TESTS_TILT_ORACLE_HPP_
#define SCENIC_TESTS_TILT_ORACLE_HPP_

#include <cmath>
#include <map>
#include <random>
#include <string>

#include "scenic/dataset.hpp"

namespace scenic::testing {

struct MonteCarloTruth {
  std::map<std::string, double> mean;
  std::map<std::string, double> stderr_;  // of the self-normalized estimate
};

inline MonteCarloTruth TiltMonteCarlo(const SyntheticSpec& spec,
                                      std::size_t samples, std::uint64_t seed) {
  const std::size_t d = spec.tilt.size();
  const auto base = spec.base.empty() ? DefaultMixture(d) : spec.base;
  std::vector<double> coef = spec.outcome_coef;
  if (coef.empty()) coef.assign(d, 1.0);
  std::vector<double> mix;
  for (const auto& c : base) mix.push_back(c.weight);
  std::discrete_distribution<std::size_t> pick(mix.begin(), mix.end());
  std::normal_distribution<double> normal;
  std::mt19937_64 rng(seed);

  std::vector<std::string> names;
  for (std::size_t j = 0; j < d; ++j) {
    names.push_back(spec.feature_prefix + std::to_string(j));
  }
  names.insert(names.end(), {"t", "visit", "conversion"});
  std::vector<double> sum_w(1, 0.0), sum_wv(names.size(), 0.0),
      sum_w2v2(names.size(), 0.0), sum_w2v(names.size(), 0.0);
  double sum_w2 = 0.0;
  std::vector<double> x(d), v(names.size());
  for (std::size_t s = 0; s < samples; ++s) {
    const auto& comp = base[pick(rng)];
    double dot = 0.0, lin = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = comp.mean[j] + comp.sd[j] * normal(rng);
      dot += spec.tilt[j] * x[j];
      lin += coef[j] * x[j];
      v[j] = x[j];
    }
    const double y = lin + spec.noise_sd * normal(rng);
    v[d] = lin;
    v[d + 1] = y > spec.visit_threshold ? 1.0 : 0.0;
    v[d + 2] = y > spec.conversion_threshold ? 1.0 : 0.0;
    const double w = std::exp(dot);
    sum_w[0] += w;
    sum_w2 += w * w;
    for (std::size_t i = 0; i < v.size(); ++i) {
      sum_wv[i] += w * v[i];
      sum_w2v2[i] += w * w * v[i] * v[i];
      sum_w2v[i] += w * w * v[i];
    }
  }
  MonteCarloTruth out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double m = sum_wv[i] / sum_w[0];
    // Delta-method variance of the ratio estimator.
    const double var =
        (sum_w2v2[i] - 2.0 * m * sum_w2v[i] + m * m * sum_w2) / (sum_w[0] * sum_w[0]);
    out.mean[names[i]] = m;
    out.stderr_[names[i]] = std::sqrt(std::max(0.0, var));
  }
  return out;
}

}  // namespace scenic::testing

#endif  // SCENIC_TESTS_TILT_ORACLE_HPP_
