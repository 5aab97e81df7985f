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
#include "scenic/server.hpp"

#include <httplib.h>

#include <filesystem>
#include <mutex>
#include <random>
#include <regex>
#include <set>

#include "scenic/errors.hpp"
#include "scenic/pipeline.hpp"

namespace scenic {

namespace fs = std::filesystem;

namespace {

struct HttpError {
  int status;
  std::string message;
};

[[noreturn]] void Fail(int status, std::string message) {
  throw HttpError{status, std::move(message)};
}

void RejectUnknown(const Json& body, std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : body.items()) {
    if (!ok.count(key)) Fail(400, "unknown field '" + key + "'");
  }
}

const Json& Field(const Json& body, const char* key) {
  if (!body.contains(key)) Fail(400, std::string("missing field '") + key + "'");
  return body.at(key);
}

std::string StringField(const Json& body, const char* key) {
  const Json& v = Field(body, key);
  if (!v.is_string()) Fail(400, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

std::size_t CountField(const Json& body, const char* key, std::size_t fallback) {
  if (!body.contains(key)) return fallback;
  const Json& v = body.at(key);
  if (!v.is_number_unsigned()) {
    Fail(400, std::string("'") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

double NumberField(const Json& body, const char* key, double fallback) {
  if (!body.contains(key)) return fallback;
  const Json& v = body.at(key);
  if (!v.is_number()) Fail(400, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::vector<std::string> StringList(const Json& v, const char* key) {
  if (!v.is_array()) Fail(400, std::string("'") + key + "' must be a list");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) Fail(400, std::string("'") + key + "' must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::vector<double> NumberList(const Json& v, const char* key) {
  if (!v.is_array()) Fail(400, std::string("'") + key + "' must be a list");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) Fail(400, std::string("'") + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Scenario ScenarioField(const Json& body, const char* key = "scenario") {
  if (!body.contains(key)) return {};
  const Json& v = body.at(key);
  if (!v.is_object()) Fail(400, std::string("'") + key + "' must be an object");
  return ParseScenario(v.dump());
}

std::uint64_t SeedField(const Json& body) {
  if (body.contains("seed")) {
    const Json& v = body.at("seed");
    if (!v.is_number_unsigned()) Fail(400, "'seed' must be a non-negative integer");
    return v.get<std::uint64_t>();
  }
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

SolverConfig SolverField(const Json& body) {
  SolverConfig config;
  if (!body.contains("solver")) return config;
  const Json& s = body.at("solver");
  if (!s.is_object()) Fail(400, "'solver' must be an object");
  RejectUnknown(s, {"max_newton_iters", "grad_tol", "active_set_max_passes"});
  if (s.contains("max_newton_iters")) {
    config.max_newton_iters = static_cast<int>(CountField(s, "max_newton_iters", 0));
  }
  config.grad_tol = NumberField(s, "grad_tol", config.grad_tol);
  if (s.contains("active_set_max_passes")) {
    config.active_set_max_passes =
        static_cast<int>(CountField(s, "active_set_max_passes", 0));
  }
  config.Validate();
  return config;
}

ResamplePlan PlanField(const Json& body, std::uint64_t seed) {
  ResamplePlan plan;
  plan.B = CountField(body, "B", plan.B);
  plan.m = CountField(body, "m", plan.m);
  plan.seed = seed;
  if (body.contains("mode")) {
    const std::string mode = StringField(body, "mode");
    if (mode == "bootstrap") {
      plan.mode = ResampleMode::kBootstrap;
    } else if (mode == "disjoint-subsets") {
      plan.mode = ResampleMode::kDisjointSubsets;
    } else {
      Fail(400, "unknown resampling mode '" + mode + "'");
    }
  }
  return plan;
}

HttpResponse Reply(int status, const Json& doc) { return {status, doc.dump()}; }

}  // namespace

struct Service::Server {
  httplib::Server http;
};

Service::Service(ServiceConfig config) : config_(std::move(config)) {}
Service::~Service() = default;

std::string Service::Register(Dataset ds) {
  const std::string id = "ds-" + HexDigest(ds.digest());
  std::unique_lock lock(mutex_);
  if (!datasets_.count(id)) {
    datasets_.emplace(id, std::make_shared<const Dataset>(std::move(ds)));
  }
  return id;
}

std::shared_ptr<const Dataset> Service::Find(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const auto it = datasets_.find(id);
  if (it == datasets_.end()) Fail(404, "unknown dataset '" + id + "'");
  return it->second;
}

HttpResponse Service::Handle(std::string_view method, std::string_view path,
                             std::string_view body_text) {
  std::optional<std::uint64_t> seed;
  auto with_seed = [&](Json doc) {
    if (seed) doc["seed"] = *seed;
    return doc;
  };
  try {
    if (body_text.size() > config_.max_body_bytes) Fail(413, "request body too large");
    if (method == "GET" && path == "/health") {
      return Reply(200, Json{{"status", "ok"}});
    }
    static const std::regex kSummary(R"(^/datasets/([A-Za-z0-9_-]+)/summary$)");
    std::cmatch match;
    const std::string path_str(path);
    if (method == "GET" && std::regex_match(path_str.c_str(), match, kSummary)) {
      const auto ds = Find(match[1].str());
      Json doc = DescribeDataset(*ds);
      doc["id"] = match[1].str();
      return Reply(200, doc);
    }

    static const std::set<std::string_view> kPostRoutes = {
        "/datasets", "/scenarios/validate", "/solve", "/bootstrap", "/sweep", "/match"};
    if (!kPostRoutes.count(path)) Fail(404, "no route " + path_str);
    if (method != "POST") Fail(405, "use POST for " + path_str);

    Json body;
    try {
      body = Json::parse(body_text);
    } catch (const Json::parse_error& e) {
      Fail(400, std::string("malformed JSON: ") + e.what());
    }
    if (!body.is_object()) Fail(400, "request body must be a JSON object");

    if (path == "/datasets") {
      RejectUnknown(body, {"path", "schema", "format", "max_rows"});
      fs::path file = StringField(body, "path");
      if (config_.dataset_dir) {
        const fs::path root = fs::weakly_canonical(*config_.dataset_dir);
        file = fs::weakly_canonical(root / file);
        const auto rel = file.lexically_relative(root);
        if (rel.empty() || *rel.begin() == "..") {
          Fail(400, "path outside the dataset directory");
        }
      }
      Dataset ds = [&] {
        const std::string format =
            body.contains("format") ? StringField(body, "format") : "csv";
        if (format == "criteo") {
          return LoadCriteo(file.string(), CountField(body, "max_rows", 0));
        }
        if (format != "csv") Fail(400, "unknown format '" + format + "'");
        const Json& schema = Field(body, "schema");
        std::vector<ColumnSpec> specs;
        if (schema.is_string()) {
          fs::path sp = schema.get<std::string>();
          if (config_.dataset_dir && sp.is_relative()) sp = fs::path(*config_.dataset_dir) / sp;
          specs = LoadSchema(sp.string());
        } else {
          specs = ParseSchema(schema.dump());
        }
        return LoadCsv(file.string(), specs);
      }();
      const std::size_t n = ds.n_rows();
      const std::string id = Register(std::move(ds));
      Json doc = DescribeDataset(*Find(id));
      doc["id"] = id;
      doc["n_rows"] = n;
      return Reply(200, doc);
    }

    if (path == "/scenarios/validate") {
      RejectUnknown(body, {"scenario", "dataset_id"});
      const Scenario scenario = ScenarioField(body);
      Json doc{{"valid", true},
               {"scenario", Json::parse(ScenarioToJson(scenario))},
               {"scenario_digest", HexDigest(Fnv1a(ScenarioToJson(scenario)))}};
      if (body.contains("dataset_id")) {
        const auto ds = Find(StringField(body, "dataset_id"));
        const Scenario resolved = ResolveTargets(scenario, *ds);
        Compile(resolved, *ds);
        Json rows = Json::array();
        for (std::size_t i = 0; i < scenario.size(); ++i) {
          rows.push_back(Json{{"label", scenario[i].DisplayLabel()},
                              {"baseline", BaselineStatistic(scenario[i], *ds)},
                              {"resolved_target", resolved[i].target.value}});
        }
        doc["constraints"] = rows;
      }
      return Reply(200, doc);
    }

    if (path == "/solve") {
      RejectUnknown(body, {"dataset_id", "scenario", "metrics", "seed", "threshold",
                           "solver", "spread"});
      seed = SeedField(body);
      const auto ds = Find(StringField(body, "dataset_id"));
      if (ds->n_rows() > config_.max_rows) Fail(413, "dataset exceeds the row cap");
      const Scenario scenario = ScenarioField(body);
      const auto metrics = body.contains("metrics")
                               ? StringList(body.at("metrics"), "metrics")
                               : ds->metric_names();
      const SolverConfig config = SolverField(body);
      const double threshold = NumberField(body, "threshold", kDefaultOutlierThreshold);
      Json doc = RunSolve(*ds, scenario, metrics, config, threshold);
      if (body.contains("spread")) {
        const Json& sp = body.at("spread");
        if (!sp.is_object()) Fail(400, "'spread' must be an object");
        RejectUnknown(sp, {"features", "multiples"});
        const auto features = StringList(Field(sp, "features"), "features");
        const auto multiples = NumberList(Field(sp, "multiples"), "multiples");
        if (multiples.size() > config_.max_solver_calls) {
          Fail(413, "spread curve exceeds the solver-call cap");
        }
        Json spread = Json::array();
        for (const auto& p : SpreadCurve(*ds, features, multiples, config)) {
          spread.push_back(ToJson(p));
        }
        doc["spread"] = spread;
      }
      doc["provenance"]["seed"] = *seed;
      const bool converged = doc["status"] == ToString(SolverStatus::kConverged);
      return Reply(converged ? 200 : 422, with_seed(std::move(doc)));
    }

    if (path == "/bootstrap") {
      RejectUnknown(body, {"dataset_id", "scenario", "metrics", "seed", "B", "m",
                           "mode", "solver"});
      seed = SeedField(body);
      const auto ds = Find(StringField(body, "dataset_id"));
      const ResamplePlan plan = PlanField(body, *seed);
      if (plan.m > config_.max_rows) Fail(413, "resample size exceeds the row cap");
      if (plan.B > config_.max_solver_calls) Fail(413, "B exceeds the solver-call cap");
      const auto metrics = body.contains("metrics")
                               ? StringList(body.at("metrics"), "metrics")
                               : ds->metric_names();
      return Reply(200, with_seed(RunBootstrap(*ds, ScenarioField(body), metrics, plan,
                                               SolverField(body))));
    }

    if (path == "/sweep") {
      RejectUnknown(body, {"dataset_id", "scenario", "metric", "axes", "seed", "B", "m",
                           "mode", "level", "solver"});
      seed = SeedField(body);
      const auto ds = Find(StringField(body, "dataset_id"));
      const Json& axes_json = Field(body, "axes");
      if (!axes_json.is_array()) Fail(400, "'axes' must be a list");
      Json templates = Json::array();
      std::vector<std::vector<double>> grids;
      for (const auto& a : axes_json) {
        if (!a.is_object()) Fail(400, "each axis must be an object");
        RejectUnknown(a, {"constraint", "grid"});
        Json c = Field(a, "constraint");
        if (!c.is_object()) Fail(400, "'constraint' must be an object");
        // The template leaves its target value open.
        if (c.contains("target") && c["target"].is_object() &&
            !c["target"].contains("value")) {
          c["target"]["value"] = 0.0;
        }
        templates.push_back(std::move(c));
        grids.push_back(NumberList(Field(a, "grid"), "grid"));
      }
      const auto axes = MakeAxes(ParseScenario(Json{{"constraints", templates}}.dump()), grids);
      const ResamplePlan plan = PlanField(body, *seed);
      std::size_t cells = 1;
      for (const auto& g : grids) cells *= g.size();
      if (cells * plan.B > config_.max_solver_calls) {
        Fail(413, "sweep cells x B exceeds the solver-call cap");
      }
      if (plan.m > config_.max_rows) Fail(413, "resample size exceeds the row cap");
      std::optional<double> level;
      if (body.contains("level")) level = NumberField(body, "level", 0.0);
      return Reply(200, with_seed(RunSweep(*ds, axes, StringField(body, "metric"),
                                           ScenarioField(body), plan, SolverField(body),
                                           level)));
    }

    // path == "/match"
    RejectUnknown(body, {"control_id", "treatment_id", "features", "metric", "caliper",
                         "accept_nonconverged", "seed"});
    seed = SeedField(body);
    const auto control = Find(StringField(body, "control_id"));
    const auto treatment = Find(StringField(body, "treatment_id"));
    if (control->n_rows() + treatment->n_rows() > config_.max_rows) {
      Fail(413, "branches exceed the row cap");
    }
    const auto features = body.contains("features")
                              ? StringList(body.at("features"), "features")
                              : std::vector<std::string>{};
    std::optional<double> caliper;
    if (body.contains("caliper")) caliper = NumberField(body, "caliper", 0.0);
    bool accept = false;
    if (body.contains("accept_nonconverged")) {
      if (!body.at("accept_nonconverged").is_boolean()) {
        Fail(400, "'accept_nonconverged' must be a boolean");
      }
      accept = body.at("accept_nonconverged").get<bool>();
    }
    Json doc = RunMatch(*control, *treatment, features, StringField(body, "metric"),
                        caliper, accept);
    doc["provenance"]["seed"] = *seed;
    return Reply(200, with_seed(std::move(doc)));
  } catch (const HttpError& e) {
    return Reply(e.status, with_seed(Json{{"error", e.message}}));
  } catch (const InfeasibleScenario& e) {
    return Reply(422, with_seed(Json{{"status", ToString(SolverStatus::kInfeasible)},
                                     {"error", e.what()},
                                     {"infeasibility", ToJson(e.report())}}));
  } catch (const ScenarioError& e) {
    return Reply(400, with_seed(Json{{"error", e.what()}, {"kind", "scenario"}}));
  } catch (const DataError& e) {
    return Reply(400, with_seed(Json{{"error", e.what()}, {"kind", "data"}}));
  } catch (const UsageError& e) {
    return Reply(400, with_seed(Json{{"error", e.what()}, {"kind", "usage"}}));
  } catch (const Json::exception& e) {
    return Reply(400, with_seed(Json{{"error", e.what()}, {"kind", "json"}}));
  }
}

namespace {

void Install(httplib::Server& http, Service& service) {
  http.set_payload_max_length(service.config().max_body_bytes);
  http.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse out = service.Handle(req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  http.Get(".*", forward);
  http.Post(".*", forward);
  http.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

}  // namespace

bool Service::Serve(const std::string& host, int port) {
  if (!server_) {
    server_ = std::make_unique<Server>();
    Install(server_->http, *this);
  }
  return server_->http.listen(host, port);
}

int Service::BindAnyPort(const std::string& host) {
  if (!server_) {
    server_ = std::make_unique<Server>();
    Install(server_->http, *this);
  }
  return server_->http.bind_to_any_port(host);
}

bool Service::ListenAfterBind() { return server_ && server_->http.listen_after_bind(); }

void Service::Stop() {
  if (server_) server_->http.stop();
}

}  // namespace scenic
