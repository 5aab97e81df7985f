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
// scenic: command-line front end. Exit codes: 0 ok, 2 usage, 3 infeasible or
// non-converged scenario, 4 data or scenario-file error.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "scenic/errors.hpp"
#include "scenic/pipeline.hpp"
#include "scenic/server.hpp"

namespace fs = std::filesystem;
using namespace scenic;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitData = 4;

struct Options {
  std::string data;
  std::string schema;
  std::string format = "csv";
  std::size_t max_rows = 0;
  std::string scenario;
  std::string base;
  std::vector<std::string> metrics;
  std::size_t B = 199;
  std::size_t m = 10000;
  std::uint64_t seed = 0;
  std::string mode = "bootstrap";
  std::string out = ".";
  double threshold = kDefaultOutlierThreshold;
  std::string grid_a;
  std::string grid_b;
  std::optional<double> level;
  std::optional<double> caliper;
  bool accept_nonconverged = false;
  std::vector<std::string> features;
  std::string treatment_data;
  std::string treatment_schema;
  std::string split_column;
  std::vector<std::string> spread_features;
  std::string multiples = "1,1.04,1.08,1.12";
  // criteo-repro
  std::string targets;
  bool targets_from_treatment = false;
  std::size_t match_rows = 200000;
  std::size_t match_pool_ratio = 4;
  std::size_t synthetic = 0;
  // gen-synth
  std::string kind = "planted";
  std::size_t n = 50000;
  std::size_t dims = 4;
  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string dataset_dir;
};

class ExitInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> ParseList(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw UsageError(std::string("bad number '") + item + "' in " + what);
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string(what) + " is empty");
  return out;
}

Dataset LoadData(const std::string& path, const std::string& schema,
                 const std::string& format, std::size_t max_rows) {
  if (path.empty()) throw UsageError("--data is required");
  if (format == "criteo") return LoadCriteo(path, max_rows);
  if (format != "csv") throw UsageError("unknown --format '" + format + "'");
  if (schema.empty()) throw UsageError("--schema is required for CSV data");
  return LoadCsv(path, LoadSchema(schema));
}

Dataset LoadData(const Options& o) { return LoadData(o.data, o.schema, o.format, o.max_rows); }

Scenario OptionalScenario(const std::string& path) {
  return path.empty() ? Scenario{} : LoadScenario(path);
}

ResamplePlan Plan(const Options& o) {
  ResamplePlan plan;
  plan.B = o.B;
  plan.m = o.m;
  plan.seed = o.seed;
  if (o.mode == "bootstrap") {
    plan.mode = ResampleMode::kBootstrap;
  } else if (o.mode == "disjoint-subsets") {
    plan.mode = ResampleMode::kDisjointSubsets;
  } else {
    throw UsageError("unknown --mode '" + o.mode + "'");
  }
  return plan;
}

fs::path OutPath(const Options& o, const char* name) {
  fs::create_directories(o.out);
  return fs::path(o.out) / name;
}

void WriteJson(const Options& o, const char* name, const Json& doc) {
  std::ofstream f(OutPath(o, name));
  f << doc.dump(2) << '\n';
  if (!f) throw DataError(std::string("cannot write ") + name);
}

// CSV exports carry the run's provenance on a leading comment line.
template <typename Writer>
void WriteCsvArtifact(const Options& o, const char* name, const Json& provenance,
                      Writer&& write) {
  std::ofstream f(OutPath(o, name));
  f << "# provenance";
  for (const auto& item : provenance.items()) {
    const Json& v = item.value();
    f << ' ' << item.key() << '=' << (v.is_string() ? v.get<std::string>() : v.dump());
  }
  f << '\n';
  write(f);
  if (!f) throw DataError(std::string("cannot write ") + name);
}

std::vector<std::string> Metrics(const Options& o, const Dataset& ds) {
  return o.metrics.empty() ? ds.metric_names() : o.metrics;
}

void PrintWarnings(const Json& doc) {
  if (doc.is_object()) {
    for (const auto& [key, v] : doc.items()) {
      if (key == "warnings" && v.is_array()) {
        for (const auto& w : v) std::cerr << "warning: " << w.get<std::string>() << '\n';
      } else {
        PrintWarnings(v);
      }
    }
  } else if (doc.is_array()) {
    for (const auto& v : doc) PrintWarnings(v);
  }
}

int CmdValidate(const Options& o) {
  const Dataset ds = LoadData(o);
  Json doc = DescribeDataset(ds);
  if (!o.scenario.empty()) {
    const Scenario scenario = LoadScenario(o.scenario);
    const Scenario resolved = ResolveTargets(scenario, ds);
    Compile(resolved, ds);
    Json rows = Json::array();
    for (std::size_t i = 0; i < scenario.size(); ++i) {
      rows.push_back(Json{{"label", scenario[i].DisplayLabel()},
                          {"baseline", BaselineStatistic(scenario[i], ds)},
                          {"resolved_target", resolved[i].target.value}});
    }
    doc["constraints"] = rows;
  }
  WriteJson(o, "validate.json", doc);
  std::printf("ok: %zu rows, %zu columns\n", ds.n_rows(), ds.n_columns());
  return 0;
}

int CmdSolve(const Options& o) {
  const Dataset ds = LoadData(o);
  const Scenario scenario = OptionalScenario(o.scenario);
  SolverResult solved;
  Json doc = RunSolve(ds, scenario, Metrics(o, ds), SolverConfig{}, o.threshold, &solved);
  WriteJson(o, "solve.json", doc);
  PrintWarnings(doc);
  if (!solved.converged()) {
    throw ExitInfeasible("solver stopped with status " + ToString(solved.status));
  }
  WriteCsvArtifact(o, "weights.csv", doc["provenance"],
                   [&](std::ostream& f) { WriteWeightsCsv(f, solved.weights); });
  for (const auto& e : doc["estimates"]) {
    std::printf("%s: %.2f\n", e["metric"].get<std::string>().c_str(),
                e["value"].get<double>());
  }
  return 0;
}

int CmdEstimate(const Options& o) {
  const Dataset ds = LoadData(o);
  const Scenario scenario = OptionalScenario(o.scenario);
  std::vector<BootstrapDistribution> dists;
  Json doc = RunBootstrap(ds, scenario, Metrics(o, ds), Plan(o), SolverConfig{}, &dists);
  WriteJson(o, "estimate.json", doc);
  WriteCsvArtifact(o, "values.csv", doc["provenance"],
                   [&](std::ostream& f) { WriteValuesCsv(f, dists); });
  WriteCsvArtifact(o, "histogram.csv", doc["provenance"],
                   [&](std::ostream& f) { WriteHistogramCsv(f, dists); });
  PrintWarnings(doc);
  for (const auto& d : dists) {
    std::printf("%s: median %.6g [q05 %.6g, q95 %.6g], %zu/%zu resamples\n",
                d.metric.c_str(), d.summary.median, d.summary.q05, d.summary.q95,
                d.values.size(), d.B_requested);
  }
  return 0;
}

int CmdDiagnose(const Options& o) {
  const Dataset ds = LoadData(o);
  const Scenario scenario = OptionalScenario(o.scenario);
  const auto multiples = o.spread_features.empty() ? std::vector<double>{}
                                                   : ParseList(o.multiples, "--multiples");
  std::vector<SpreadPoint> spread;
  Json doc = RunDiagnose(ds, scenario, SolverConfig{}, o.threshold, o.spread_features,
                         multiples, &spread);
  WriteJson(o, "diagnose.json", doc);
  PrintWarnings(doc);
  if (doc.contains("spread")) {
    std::vector<BoxplotStats> boxes;
    for (const auto& p : spread) {
      if (p.boxplot) boxes.push_back(*p.boxplot);
    }
    WriteCsvArtifact(o, "spread.csv", doc["provenance"],
                     [&](std::ostream& f) { WriteBoxplotCsv(f, boxes); });
  }
  if (doc.contains("diagnostics")) {
    const auto& d = doc["diagnostics"];
    std::printf("ess %.6g (ratio %.4f), entropy ratio %.4f, outliers %zu\n",
                d["ess"].get<double>(), d["ess_ratio"].get<double>(),
                d["entropy_ratio"].get<double>(), d["outlier_count"].get<std::size_t>());
  } else {
    throw ExitInfeasible("solver stopped with status " + doc["status"].get<std::string>());
  }
  return 0;
}

int CmdSweep(const Options& o) {
  const Dataset ds = LoadData(o);
  if (o.scenario.empty()) throw UsageError("--scenario must hold the axis templates");
  if (o.metrics.size() != 1) throw UsageError("sweep takes exactly one --metric");
  std::vector<std::vector<double>> grids;
  if (o.grid_a.empty()) throw UsageError("--grid-a is required");
  grids.push_back(ParseList(o.grid_a, "--grid-a"));
  if (!o.grid_b.empty()) grids.push_back(ParseList(o.grid_b, "--grid-b"));
  const auto axes = MakeAxes(LoadScenario(o.scenario), grids);
  SweepResult result;
  Json doc = RunSweep(ds, axes, o.metrics.front(), OptionalScenario(o.base), Plan(o),
                      SolverConfig{}, o.level, &result);
  WriteJson(o, "sweep.json", doc);
  WriteCsvArtifact(o, "sweep.csv", doc["provenance"],
                   [&](std::ostream& f) { WriteSweepCsv(f, result); });
  PrintWarnings(doc);
  std::size_t done = 0;
  for (const auto& c : result.cells) done += c.summary ? 1 : 0;
  std::printf("%zu/%zu cells with estimates\n", done, result.cells.size());
  if (doc.contains("exchange_rate")) {
    std::printf("contour: %zu points\n", doc["exchange_rate"]["points"].size());
  }
  return 0;
}

int CmdMatch(const Options& o) {
  if (o.metrics.size() != 1) throw UsageError("match takes exactly one --metric");
  const Dataset all = LoadData(o);
  std::optional<Dataset> control, treatment;
  if (!o.treatment_data.empty()) {
    control = all;
    treatment = LoadData(o.treatment_data,
                         o.treatment_schema.empty() ? o.schema : o.treatment_schema,
                         o.format, o.max_rows);
  } else {
    const std::string column = o.split_column.empty() ? "treatment" : o.split_column;
    if (!all.has_column(column)) {
      throw UsageError("give --treatment-data or a --split-column present in the data");
    }
    control = all.filter(column, 0.0);
    treatment = all.filter(column, 1.0);
  }
  MatchResult result;
  Json doc = RunMatch(*control, *treatment, o.features, o.metrics.front(), o.caliper,
                      o.accept_nonconverged, &result);
  WriteJson(o, "match.json", doc);
  WriteCsvArtifact(o, "pairs.csv", doc["provenance"],
                   [&](std::ostream& f) { WritePairsCsv(f, result); });
  PrintWarnings(doc);
  std::printf("%s: matched %.6g, control %.6g, treatment %.6g (%zu pairs)\n",
              o.metrics.front().c_str(), doc["estimate"].get<double>(),
              doc["control_mean"].get<double>(), doc["treatment_mean"].get<double>(),
              result.pairs.size());
  return 0;
}

int CmdCriteo(const Options& o) {
  CriteoOptions opt;
  opt.B = o.B;
  opt.m = o.m;
  opt.seed = o.seed;
  opt.match_rows = o.match_rows;
  opt.match_pool_ratio = o.match_pool_ratio;
  if (!o.features.empty()) opt.features = o.features;
  if (!o.metrics.empty()) {
    if (o.metrics.size() != 1) throw UsageError("criteo-repro takes one --metric");
    opt.metric = o.metrics.front();
  }
  if (!o.split_column.empty()) opt.treatment_column = o.split_column;
  Dataset ds = o.synthetic > 0
                   ? CriteoLikeSynthetic(o.synthetic, o.synthetic, o.seed)
                   : (o.data.empty() ? throw UsageError("give --data or --synthetic")
                                     : LoadData(o.data, o.schema,
                                                o.schema.empty() ? "criteo" : o.format,
                                                o.max_rows));
  if (o.targets_from_treatment) {
    const auto means = ColumnMeans(ds.filter(opt.treatment_column, 1.0), opt.features);
    opt.targets.clear();
    for (const auto& f : opt.features) opt.targets.push_back(means.at(f));
  } else if (!o.targets.empty()) {
    opt.targets = ParseList(o.targets, "--targets");
  }
  const CriteoReport rep = CriteoRepro(ds, opt);
  WriteJson(o, "criteo.json", rep.document);
  WriteCsvArtifact(o, "criteo_histograms.csv", rep.document["provenance"],
                   [&](std::ostream& f) {
                     WriteHistogramCsv(f, {rep.control, rep.scenario, rep.matching,
                                           rep.treatment});
                   });
  PrintWarnings(rep.document);
  for (const auto* d : {&rep.control, &rep.scenario, &rep.matching, &rep.treatment}) {
    std::printf("%-9s mean %.6f  sd %.6f\n", d->metric.c_str(), d->summary.mean,
                d->summary.sd);
  }
  std::printf("prediction_below_control=%s prediction_above_treatment=%s "
              "matching_between=%s\n",
              rep.prediction_below_control ? "true" : "false",
              rep.prediction_above_treatment ? "true" : "false",
              rep.matching_between ? "true" : "false");
  return 0;
}

int CmdGenSynth(const Options& o) {
  if (o.kind == "criteo") {
    const Dataset ds = CriteoLikeSynthetic(o.n, o.n, o.seed);
    WriteCsv(ds, OutPath(o, "criteo.csv").string());
    std::ofstream(OutPath(o, "criteo.schema.json")) << SchemaToJson(ds.specs()) << '\n';
    std::printf("wrote %zu rows\n", ds.n_rows());
    return 0;
  }
  if (o.kind != "planted") throw UsageError("--kind is planted or criteo");
  SyntheticSpec spec;
  spec.n = o.n;
  spec.seed = o.seed;
  spec.tilt.assign(o.dims, 0.0);
  for (std::size_t d = 0; d < o.dims; ++d) spec.tilt[d] = d % 2 == 0 ? 0.3 : -0.2;
  const PlantedTilt data = GeneratePlantedTilt(spec);
  WriteCsv(data.control, OutPath(o, "control.csv").string());
  WriteCsv(data.treatment, OutPath(o, "treatment.csv").string());
  std::ofstream(OutPath(o, "schema.json")) << SchemaToJson(data.control.specs()) << '\n';
  Json truth{{"tilted", data.truth}, {"base", data.base_truth}, {"seed", o.seed}};
  WriteJson(o, "truth.json", truth);
  std::printf("wrote %zu control and %zu treatment rows\n", data.control.n_rows(),
              data.treatment.n_rows());
  return 0;
}

int CmdServe(const Options& o) {
  ServiceConfig config;
  if (!o.dataset_dir.empty()) config.dataset_dir = o.dataset_dir;
  Service service(config);
  std::fprintf(stderr, "listening on %s:%d\n", o.host.c_str(), o.port);
  if (!service.Serve(o.host, o.port)) {
    throw UsageError("cannot bind " + o.host + ":" + std::to_string(o.port));
  }
  return 0;
}

void AddData(CLI::App* cmd, Options& o) {
  cmd->add_option("--data", o.data, "CSV file");
  cmd->add_option("--schema", o.schema, "schema JSON for --data");
  cmd->add_option("--format", o.format, "csv or criteo")->check(CLI::IsMember({"csv", "criteo"}));
  cmd->add_option("--max-rows", o.max_rows, "read at most this many rows (criteo)");
  cmd->add_option("--out", o.out, "output directory");
}

void AddPlan(CLI::App* cmd, Options& o) {
  cmd->add_option("--B", o.B, "number of resamples");
  cmd->add_option("--m", o.m, "rows per resample");
  cmd->add_option("--seed", o.seed, "resampling seed");
  cmd->add_option("--mode", o.mode, "bootstrap or disjoint-subsets");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scenario analysis by maximum-entropy reweighting"};
  app.require_subcommand(1);
  Options o;
  int (*run)(const Options&) = nullptr;
  auto sub = [&](const char* name, const char* help, int (*fn)(const Options&)) {
    CLI::App* cmd = app.add_subcommand(name, help);
    cmd->callback([&run, fn] { run = fn; });
    return cmd;
  };

  auto* validate = sub("validate", "check a dataset and optional scenario", CmdValidate);
  AddData(validate, o);
  validate->add_option("--scenario", o.scenario, "scenario JSON");

  auto* solve = sub("solve", "solve for scenario weights and point estimates", CmdSolve);
  AddData(solve, o);
  solve->add_option("--scenario", o.scenario, "scenario JSON");
  solve->add_option("--metric", o.metrics, "metric column (repeatable)");
  solve->add_option("--threshold", o.threshold, "relative-weight outlier threshold");

  auto* estimate = sub("estimate", "bootstrap the scenario estimate", CmdEstimate);
  AddData(estimate, o);
  AddPlan(estimate, o);
  estimate->add_option("--scenario", o.scenario, "scenario JSON");
  estimate->add_option("--metric", o.metrics, "metric column (repeatable)");

  auto* diagnose = sub("diagnose", "weight diagnostics and spread curve", CmdDiagnose);
  AddData(diagnose, o);
  diagnose->add_option("--scenario", o.scenario, "scenario JSON");
  diagnose->add_option("--threshold", o.threshold, "relative-weight outlier threshold");
  diagnose->add_option("--spread-feature", o.spread_features, "feature for the spread curve");
  diagnose->add_option("--multiples", o.multiples, "comma-separated mean multiples");

  auto* sweep = sub("sweep", "sweep one or two constraint targets", CmdSweep);
  AddData(sweep, o);
  AddPlan(sweep, o);
  sweep->add_option("--scenario", o.scenario, "axis template constraints");
  sweep->add_option("--base", o.base, "constraints held fixed in every cell");
  sweep->add_option("--metric", o.metrics, "metric column");
  sweep->add_option("--grid-a", o.grid_a, "comma-separated targets for axis a");
  sweep->add_option("--grid-b", o.grid_b, "comma-separated targets for axis b");
  sweep->add_option("--level", o.level, "median level for the exchange-rate contour");

  auto* match = sub("match", "propensity-score matching estimate", CmdMatch);
  AddData(match, o);
  match->add_option("--treatment-data", o.treatment_data, "treatment branch CSV");
  match->add_option("--treatment-schema", o.treatment_schema, "schema for the treatment CSV");
  match->add_option("--split-column", o.split_column, "indicator splitting --data");
  match->add_option("--feature", o.features, "propensity feature (repeatable)");
  match->add_option("--metric", o.metrics, "metric column");
  match->add_option("--caliper", o.caliper, "caliper in score standard deviations");
  match->add_flag("--accept-nonconverged", o.accept_nonconverged,
                  "match even if the propensity fit did not converge");

  auto* criteo = sub("criteo-repro", "control/scenario/matching/treatment comparison",
                     CmdCriteo);
  AddData(criteo, o);
  AddPlan(criteo, o);
  criteo->add_option("--feature", o.features, "constrained feature (repeatable)");
  criteo->add_option("--targets", o.targets, "comma-separated absolute targets");
  criteo->add_flag("--targets-from-treatment", o.targets_from_treatment,
                   "use the treatment branch means as targets");
  criteo->add_option("--metric", o.metrics, "metric column");
  criteo->add_option("--split-column", o.split_column, "treatment indicator");
  criteo->add_option("--match-rows", o.match_rows, "rows per branch used for matching");
  criteo->add_option("--match-pool-ratio", o.match_pool_ratio,
                     "control rows per treatment row in the match subsample");
  criteo->add_option("--synthetic", o.synthetic, "generate this many rows per branch");

  auto* gen = sub("gen-synth", "write planted-tilt or Criteo-shaped synthetic data",
                  CmdGenSynth);
  gen->add_option("--kind", o.kind, "planted or criteo");
  gen->add_option("--n", o.n, "rows per branch");
  gen->add_option("--dims", o.dims, "feature count (planted)");
  gen->add_option("--seed", o.seed, "generator seed");
  gen->add_option("--out", o.out, "output directory");

  auto* serve = sub("serve", "run the HTTP JSON service", CmdServe);
  serve->add_option("--host", o.host, "bind address");
  serve->add_option("--port", o.port, "port");
  serve->add_option("--dataset-dir", o.dataset_dir, "restrict dataset paths to this dir");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  try {
    return run(o);
  } catch (const InfeasibleScenario& e) {
    std::cerr << "infeasible scenario: " << e.what() << '\n';
    for (const auto& label : e.report().offending_labels) {
      std::cerr << "  offending constraint: " << label << '\n';
    }
    Json doc{{"status", "infeasible"}, {"infeasibility", ToJson(e.report())}};
    try {
      WriteJson(o, "infeasibility.json", doc);
    } catch (const std::exception&) {
    }
    return kExitInfeasible;
  } catch (const ExitInfeasible& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "file error: " << e.what() << '\n';
    return kExitData;
  }
}
