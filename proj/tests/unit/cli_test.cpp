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
// Runs the installed-shape CLI binary end to end.
#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "scenic/pipeline.hpp"
#include "scenic/server.hpp"

namespace scenic {
namespace {

namespace fs = std::filesystem;
using testing::FixturePath;

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult RunCli(const std::string& args) {
  const std::string cmd = std::string(SCENIC_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  RunResult r;
  if (!pipe) return r;
  char buf[512];
  while (fgets(buf, sizeof(buf), pipe)) r.out += buf;
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("scenic_cli_" + std::string(::testing::UnitTest::GetInstance()
                                            ->current_test_info()
                                            ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Shoes() const {
    return "--data " + FixturePath("shoes.csv") + " --schema " +
           FixturePath("shoes.schema.json");
  }
  std::string Out(const std::string& sub) const { return " --out " + (dir_ / sub).string(); }

  fs::path dir_;
};

TEST_F(CliTest, SolvePrintsShoeEstimate) {
  const RunResult r = RunCli("solve " + Shoes() + " --scenario " +
                             FixturePath("double_males.json") + " --metric price" + Out("a"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "price: 272.73\n");
  EXPECT_TRUE(fs::exists(dir_ / "a" / "weights.csv"));
  const Json doc = Json::parse(Slurp(dir_ / "a" / "solve.json"));
  EXPECT_TRUE(doc["provenance"].contains("dataset_digest"));
  const std::string weights = Slurp(dir_ / "a" / "weights.csv");
  EXPECT_EQ(weights.rfind("# provenance dataset_digest=", 0), 0u);
}

TEST_F(CliTest, InfeasibleExitsThree) {
  const RunResult r = RunCli("solve " + Shoes() + " --scenario " +
                             FixturePath("male_age_100.json") + " --metric price" + Out("b"));
  EXPECT_EQ(r.code, 3);
  const Json doc = Json::parse(Slurp(dir_ / "b" / "infeasibility.json"));
  EXPECT_EQ(doc["infeasibility"]["offending_labels"][0], "male age 100");
}

TEST_F(CliTest, UsageAndDataErrors) {
  EXPECT_EQ(RunCli("solve --bogus-flag").code, 2);
  EXPECT_EQ(RunCli("").code, 2);
  EXPECT_EQ(RunCli("solve --schema x.json" + Out("c")).code, 2);  // no --data
  EXPECT_EQ(RunCli("solve --data /no/such.csv --schema " + FixturePath("shoes.schema.json") +
                   Out("c"))
                .code,
            4);
  EXPECT_EQ(RunCli("estimate " + Shoes() + " --metric price --B 0" + Out("c")).code, 2);
}

TEST_F(CliTest, EstimateIsByteIdenticalAcrossRuns) {
  const std::string args = "estimate " + Shoes() + " --scenario " +
                           FixturePath("double_males.json") +
                           " --metric price --B 199 --m 10000 --seed 7";
  ASSERT_EQ(RunCli(args + Out("r1")).code, 0);
  ASSERT_EQ(RunCli(args + Out("r2")).code, 0);
  for (const char* f : {"values.csv", "histogram.csv", "estimate.json"}) {
    const std::string a = Slurp(dir_ / "r1" / f);
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, Slurp(dir_ / "r2" / f)) << f;
  }
}

TEST_F(CliTest, CliAndHttpAgree) {
  const std::string args = "estimate " + Shoes() + " --scenario " +
                           FixturePath("male_age_ge_65.json") +
                           " --metric price --B 50 --m 200 --seed 13" + Out("d");
  ASSERT_EQ(RunCli(args).code, 0);
  const Json cli = Json::parse(Slurp(dir_ / "d" / "estimate.json"));

  Service service;
  const std::string id = service.Register(testing::Shoes());
  std::ifstream sf(FixturePath("male_age_ge_65.json"));
  const Json req{{"dataset_id", id}, {"scenario", Json::parse(sf)}, {"metrics", {"price"}},
                 {"B", 50}, {"m", 200}, {"seed", 13}};
  const HttpResponse r = service.Handle("POST", "/bootstrap", req.dump());
  ASSERT_EQ(r.status, 200) << r.body;
  Json http = Json::parse(r.body);
  http.erase("seed");
  EXPECT_EQ(cli, http);
}

TEST_F(CliTest, SweepAcceptsNegativeGrid) {
  const fs::path tmpl = dir_ / "axes.json";
  std::ofstream(tmpl) << R"({"constraints":[
    {"feature":"age","statistic":"weighted-mean","relation":"eq",
     "target":{"mode":"lift-percent","value":0}}]})";
  const RunResult r = RunCli("sweep " + Shoes() + " --scenario " + tmpl.string() +
                             " --metric price --grid-a -10,-5,0,5 --B 20 --m 50 --seed 1" +
                             Out("e"));
  EXPECT_EQ(r.code, 0);
  const Json doc = Json::parse(Slurp(dir_ / "e" / "sweep.json"));
  EXPECT_EQ(doc["sweep"]["cells"].size(), 4u);
  EXPECT_EQ(doc["sweep"]["axes"][0]["grid"][0], -10.0);
}

TEST_F(CliTest, GenSynthThenCriteoRepro) {
  ASSERT_EQ(RunCli("gen-synth --kind criteo --n 20000 --seed 4" + Out("g")).code, 0);
  const fs::path data = dir_ / "g" / "criteo.csv";
  ASSERT_TRUE(fs::exists(data));
  const RunResult r = RunCli("criteo-repro --data " + data.string() +
                             " --format criteo --targets-from-treatment --B 40 --m 4000"
                             " --seed 7 --match-rows 8000" + Out("h"));
  ASSERT_EQ(r.code, 0);
  const Json doc = Json::parse(Slurp(dir_ / "h" / "criteo.json"));
  EXPECT_EQ(doc["panes"].size(), 4u);
  EXPECT_TRUE(doc["flags"]["prediction_below_control"].get<bool>());
  EXPECT_TRUE(doc["flags"]["prediction_above_treatment"].get<bool>());
  EXPECT_TRUE(fs::exists(dir_ / "h" / "criteo_histograms.csv"));
}

TEST_F(CliTest, MatchSplitsOnTreatmentColumn) {
  ASSERT_EQ(RunCli("gen-synth --kind criteo --n 3000 --seed 5" + Out("m")).code, 0);
  const RunResult r = RunCli("match --data " + (dir_ / "m" / "criteo.csv").string() +
                             " --format criteo --metric visit" + Out("m2"));
  EXPECT_EQ(r.code, 0);
  const Json doc = Json::parse(Slurp(dir_ / "m2" / "match.json"));
  EXPECT_EQ(doc["match"]["pairs"].size(), 3000u);
  // Metric columns never enter the propensity model.
  EXPECT_EQ(doc["model"]["features"].size(), 12u);
  for (const auto& f : doc["model"]["features"]) {
    EXPECT_EQ(f["name"].get<std::string>()[0], 'f');
  }
}

}  // namespace
}  // namespace scenic
