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
#include <httplib.h>
#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "fixtures.hpp"
#include "scenic/pipeline.hpp"
#include "scenic/server.hpp"

namespace scenic {
namespace {

using testing::FixturePath;

Json ReadJsonFile(const std::string& path) {
  std::ifstream f(path);
  return Json::parse(f);
}

Json Body(const HttpResponse& r) { return Json::parse(r.body); }

class ServiceTest : public ::testing::Test {
 protected:
  std::string RegisterShoes() {
    const Json req{{"path", FixturePath("shoes.csv")},
                   {"schema", FixturePath("shoes.schema.json")}};
    const HttpResponse r = service_.Handle("POST", "/datasets", req.dump());
    EXPECT_EQ(r.status, 200) << r.body;
    return Body(r)["id"].get<std::string>();
  }

  HttpResponse Solve(const std::string& id, const std::string& scenario_file) {
    const Json req{{"dataset_id", id},
                   {"scenario", ReadJsonFile(FixturePath(scenario_file))},
                   {"metrics", {"price"}},
                   {"seed", 11}};
    return service_.Handle("POST", "/solve", req.dump());
  }

  Service service_;
};

TEST_F(ServiceTest, Health) {
  const HttpResponse r = service_.Handle("GET", "/health", "");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(Body(r), Json({{"status", "ok"}}));
}

TEST_F(ServiceTest, UnknownRouteAndMethod) {
  EXPECT_EQ(service_.Handle("GET", "/nope", "").status, 404);
  EXPECT_EQ(service_.Handle("GET", "/solve", "").status, 405);
  EXPECT_EQ(service_.Handle("POST", "/solve", "{not json").status, 400);
  EXPECT_EQ(service_.Handle("POST", "/solve", "[1,2]").status, 400);
}

TEST_F(ServiceTest, RegisterAndSummarize) {
  const std::string id = RegisterShoes();
  EXPECT_EQ(RegisterShoes(), id);  // content-addressed
  const HttpResponse r = service_.Handle("GET", "/datasets/" + id + "/summary", "");
  ASSERT_EQ(r.status, 200);
  const Json doc = Body(r);
  EXPECT_EQ(doc["n_rows"], 7);
  ASSERT_EQ(doc["columns"].size(), 5u);
  EXPECT_EQ(doc["columns"][4]["name"], "price");
  EXPECT_NEAR(doc["columns"][4]["mean"].get<double>(), 1790.0 / 7.0, 1e-12);
  EXPECT_EQ(service_.Handle("GET", "/datasets/ds-0000/summary", "").status, 404);
}

TEST_F(ServiceTest, RegisterRejectsBadInput) {
  EXPECT_EQ(service_.Handle("POST", "/datasets", R"({"path":"/no/such.csv","schema":{"columns":[]}})")
                .status,
            400);
  EXPECT_EQ(service_.Handle("POST", "/datasets", R"({"schema":"x"})").status, 400);
  EXPECT_EQ(service_.Handle("POST", "/datasets", R"({"path":"a","schema":"b","extra":1})")
                .status,
            400);
}

TEST_F(ServiceTest, InlineSchema) {
  const Json req{{"path", FixturePath("shoes.csv")},
                 {"schema", ReadJsonFile(FixturePath("shoes.schema.json"))}};
  const HttpResponse r = service_.Handle("POST", "/datasets", req.dump());
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(Body(r)["id"], RegisterShoes());
}

TEST(ServiceDirTest, PathsConfinedToDatasetDir) {
  ServiceConfig config;
  config.dataset_dir = SCENIC_FIXTURE_DIR;
  Service service(config);
  HttpResponse ok = service.Handle(
      "POST", "/datasets", R"({"path":"shoes.csv","schema":"shoes.schema.json"})");
  EXPECT_EQ(ok.status, 200) << ok.body;
  HttpResponse escape = service.Handle(
      "POST", "/datasets", R"({"path":"../fixtures/../../CMakeLists.txt","schema":"shoes.schema.json"})");
  EXPECT_EQ(escape.status, 400);
  EXPECT_NE(escape.body.find("outside"), std::string::npos);
}

TEST_F(ServiceTest, SolveDoubledMales) {
  const HttpResponse r = Solve(RegisterShoes(), "double_males.json");
  ASSERT_EQ(r.status, 200) << r.body;
  const Json doc = Body(r);
  EXPECT_EQ(doc["seed"], 11);
  EXPECT_EQ(doc["status"], "converged");
  EXPECT_NEAR(doc["estimates"][0]["value"].get<double>(), 3000.0 / 11.0, 1e-6);
  EXPECT_NEAR(doc["baseline"]["price"].get<double>(), 1790.0 / 7.0, 1e-9);
  const auto& rel = doc["diagnostics"]["relative_weights"];
  ASSERT_EQ(rel.size(), 7u);
  EXPECT_NEAR(rel[0].get<double>() / rel[2].get<double>(), 0.5, 1e-9);  // F, M
  EXPECT_NE(r.body.find("272.72727272727"), std::string::npos);
}

TEST_F(ServiceTest, SolveInfeasibleIs422WithLabel) {
  const HttpResponse r = Solve(RegisterShoes(), "male_age_100.json");
  ASSERT_EQ(r.status, 422) << r.body;
  const Json doc = Body(r);
  EXPECT_EQ(doc["status"], "infeasible");
  EXPECT_EQ(doc["seed"], 11);
  EXPECT_EQ(doc["infeasibility"]["offending_labels"][0], "male age 100");
}

TEST_F(ServiceTest, SolveWithSpreadPayload) {
  const Json req{{"dataset_id", RegisterShoes()},
                 {"spread", {{"features", {"age"}}, {"multiples", {1.0, 1.02}}}}};
  const HttpResponse r = service_.Handle("POST", "/solve", req.dump());
  ASSERT_EQ(r.status, 200) << r.body;
  const Json doc = Body(r);
  ASSERT_EQ(doc["spread"].size(), 2u);
  EXPECT_NEAR(doc["spread"][0]["boxplot"]["median"].get<double>(), 1.0, 1e-8);
  EXPECT_TRUE(doc.contains("seed"));  // generated when absent
}

TEST_F(ServiceTest, ValidateScenario) {
  const std::string id = RegisterShoes();
  Json req{{"scenario", ReadJsonFile(FixturePath("double_males.json"))}, {"dataset_id", id}};
  HttpResponse r = service_.Handle("POST", "/scenarios/validate", req.dump());
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_NEAR(Body(r)["constraints"][0]["resolved_target"].get<double>(), 8.0 / 11.0, 1e-12);

  req["scenario"]["constraints"][0]["relation"] = "approximately";
  r = service_.Handle("POST", "/scenarios/validate", req.dump());
  EXPECT_EQ(r.status, 400);
  EXPECT_NE(r.body.find("constraints[0].relation"), std::string::npos) << r.body;

  req = {{"scenario", ReadJsonFile(FixturePath("male_age_100.json"))}, {"dataset_id", id}};
  EXPECT_EQ(service_.Handle("POST", "/scenarios/validate", req.dump()).status, 422);
}

TEST_F(ServiceTest, BootstrapIsSeedDeterministic) {
  const Dataset ds = GeneratePlantedTilt({.n = 3000, .tilt = {0.2, -0.1}, .seed = 5}).control;
  const std::string id = service_.Register(ds);
  const Json req{{"dataset_id", id},
                 {"scenario", {{"constraints", {{{"feature", "x0"},
                                                 {"statistic", "weighted-mean"},
                                                 {"relation", "eq"},
                                                 {"target", {{"mode", "lift-percent"},
                                                             {"value", 5}}}}}}}},
                 {"metrics", {"t"}},
                 {"B", 20},
                 {"m", 500},
                 {"seed", 99}};
  const HttpResponse a = service_.Handle("POST", "/bootstrap", req.dump());
  const HttpResponse b = service_.Handle("POST", "/bootstrap", req.dump());
  ASSERT_EQ(a.status, 200) << a.body;
  EXPECT_EQ(a.body, b.body);
  EXPECT_EQ(Body(a)["seed"], 99);
  EXPECT_EQ(Body(a)["distributions"][0]["values"].size(), 20u);

  Json unseeded = req;
  unseeded.erase("seed");
  const Json c = Body(service_.Handle("POST", "/bootstrap", unseeded.dump()));
  ASSERT_TRUE(c["seed"].is_number_unsigned());
  Json replay = req;
  replay["seed"] = c["seed"];
  EXPECT_EQ(Body(service_.Handle("POST", "/bootstrap", replay.dump()))["distributions"],
            c["distributions"]);
}

TEST_F(ServiceTest, SweepWithContourAndCaps) {
  const Dataset ds = GeneratePlantedTilt({.n = 4000, .tilt = {0.0, 0.0}, .seed = 2}).control;
  const std::string id = service_.Register(ds);
  auto axis = [](const char* f, std::vector<double> grid) {
    return Json{{"constraint", {{"feature", f},
                                {"statistic", "weighted-mean"},
                                {"relation", "eq"},
                                {"target", {{"mode", "absolute"}}}}},
                {"grid", grid}};
  };
  Json req{{"dataset_id", id},
           {"metric", "t"},
           {"axes", {axis("x0", {0.4, 0.6, 0.8}), axis("x1", {0.4, 0.6, 0.8})}},
           {"B", 10},
           {"m", 1000},
           {"seed", 3},
           {"level", 1.2}};
  const HttpResponse r = service_.Handle("POST", "/sweep", req.dump());
  ASSERT_EQ(r.status, 200) << r.body;
  const Json doc = Body(r);
  ASSERT_EQ(doc["sweep"]["cells"].size(), 3u);
  EXPECT_EQ(doc["sweep"]["cells"][0].size(), 3u);
  EXPECT_TRUE(doc.contains("exchange_rate"));

  req["B"] = 6000;  // 9 cells x 6000 > 50,000
  EXPECT_EQ(service_.Handle("POST", "/sweep", req.dump()).status, 413);
}

TEST(ServiceCapsTest, RowCap) {
  ServiceConfig config;
  config.max_rows = 5;
  Service service(config);
  const std::string id = service.Register(testing::Shoes());
  const Json req{{"dataset_id", id}};
  EXPECT_EQ(service.Handle("POST", "/solve", req.dump()).status, 413);
  config.max_body_bytes = 10;
  Service tiny(config);
  EXPECT_EQ(tiny.Handle("POST", "/solve", std::string(64, ' ')).status, 413);
}

TEST_F(ServiceTest, MatchEndpoint) {
  const PlantedTilt data = GeneratePlantedTilt({.n = 2000, .n_treatment = 500,
                                                .tilt = {0.4, -0.3}, .seed = 8});
  const std::string c = service_.Register(data.control);
  const std::string t = service_.Register(data.treatment);
  const Json req{{"control_id", c}, {"treatment_id", t}, {"metric", "t"}, {"seed", 1}};
  const HttpResponse r = service_.Handle("POST", "/match", req.dump());
  ASSERT_EQ(r.status, 200) << r.body;
  const Json doc = Body(r);
  EXPECT_EQ(doc["match"]["pairs"].size(), 500u);
  const double est = doc["estimate"].get<double>();
  EXPECT_LT(std::abs(est - data.truth.at("t")), std::abs(doc["control_mean"].get<double>() -
                                                         data.truth.at("t")));
  // Treatment equal to control: the matched estimate is the control mean.
  const Json self{{"control_id", c}, {"treatment_id", c}, {"metric", "t"}};
  const Json same = Body(service_.Handle("POST", "/match", self.dump()));
  EXPECT_DOUBLE_EQ(same["estimate"].get<double>(), same["control_mean"].get<double>());
  EXPECT_EQ(service_.Handle("POST", "/match",
                            Json{{"control_id", c}, {"treatment_id", "ds-x"}, {"metric", "t"}}
                                .dump())
                .status,
            404);
}

TEST(ServiceSocketTest, RoundTripMatchesInProcessHandler) {
  Service service;
  const int port = service.BindAnyPort("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread loop([&] { service.ListenAfterBind(); });

  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(health->get_header_value("Content-Type"), "application/json");

  const Json reg{{"path", FixturePath("shoes.csv")},
                 {"schema", FixturePath("shoes.schema.json")}};
  auto r = client.Post("/datasets", reg.dump(), "application/json");
  ASSERT_TRUE(r);
  ASSERT_EQ(r->status, 200) << r->body;
  const std::string id = Json::parse(r->body)["id"];

  const Json solve{{"dataset_id", id},
                   {"scenario", ReadJsonFile(FixturePath("double_males.json"))},
                   {"metrics", {"price"}},
                   {"seed", 4}};
  auto s = client.Post("/solve", solve.dump(), "application/json");
  ASSERT_TRUE(s);
  EXPECT_EQ(s->status, 200);
  EXPECT_EQ(s->body, service.Handle("POST", "/solve", solve.dump()).body);

  const Json bad{{"dataset_id", id},
                 {"scenario", ReadJsonFile(FixturePath("male_age_100.json"))}};
  auto f = client.Post("/solve", bad.dump(), "application/json");
  ASSERT_TRUE(f);
  EXPECT_EQ(f->status, 422);

  service.Stop();
  loop.join();
}

}  // namespace
}  // namespace scenic
