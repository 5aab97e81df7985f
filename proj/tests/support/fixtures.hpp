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
#ifndef SCENIC_TESTS_FIXTURES_HPP_
#define SCENIC_TESTS_FIXTURES_HPP_

#include <string>

#include "scenic/dataset.hpp"
#include "scenic/scenario.hpp"

namespace scenic::testing {

inline std::string FixturePath(const std::string& name) {
  return std::string(SCENIC_FIXTURE_DIR) + "/" + name;
}

inline Dataset Shoes() {
  return LoadCsv(FixturePath("shoes.csv"),
                 LoadSchema(FixturePath("shoes.schema.json")));
}

inline Scenario ShoeScenario(const std::string& name) {
  return LoadScenario(FixturePath(name));
}

}  // namespace scenic::testing

#endif  // SCENIC_TESTS_FIXTURES_HPP_
