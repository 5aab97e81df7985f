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
// Python bindings. Results cross the boundary as JSON text and are decoded in
// the pure-Python layer; weights and columns come back as numpy arrays.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "scenic/errors.hpp"
#include "scenic/pipeline.hpp"

namespace py = pybind11;
using namespace scenic;

namespace {

py::array_t<double> ToArray(std::span<const double> v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Scenario ScenarioFrom(const std::string& json_text) {
  return json_text.empty() ? Scenario{} : ParseScenario(json_text);
}

ResamplePlan MakePlan(std::size_t B, std::size_t m, std::uint64_t seed,
                      const std::string& mode) {
  ResamplePlan plan{ResampleMode::kBootstrap, B, m, seed};
  if (mode == "disjoint-subsets") {
    plan.mode = ResampleMode::kDisjointSubsets;
  } else if (mode != "bootstrap") {
    throw UsageError("unknown resampling mode '" + mode + "'");
  }
  return plan;
}

Dataset FromColumns(const std::vector<std::string>& names,
                    const std::vector<std::string>& kinds,
                    const std::vector<std::vector<double>>& columns) {
  if (names.size() != kinds.size() || names.size() != columns.size()) {
    throw UsageError("names, kinds and columns must have the same length");
  }
  std::vector<ColumnSpec> specs;
  for (std::size_t i = 0; i < names.size(); ++i) {
    specs.push_back({names[i], ParseColumnKind(kinds[i]), ""});
  }
  return Dataset(std::move(specs), columns);
}

}  // namespace

PYBIND11_MODULE(_scenic, m) {
  m.doc() = "Scenario analysis by maximum-entropy reweighting (native core)";

  static py::exception<std::runtime_error> base(m, "ScenicError", PyExc_RuntimeError);
  static py::exception<DataError> data_error(m, "DataError", base.ptr());
  static py::exception<ScenarioError> scenario_error(m, "ScenarioError", base.ptr());
  static py::exception<UsageError> usage_error(m, "UsageError", base.ptr());
  static py::exception<InfeasibleScenario> infeasible(m, "InfeasibleScenario", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InfeasibleScenario& e) {
      // args = (message, report as JSON text)
      const py::tuple args = py::make_tuple(e.what(), ToJson(e.report()).dump());
      PyErr_SetObject(infeasible.ptr(), args.ptr());
    } catch (const DataError& e) {
      PyErr_SetString(data_error.ptr(), e.what());
    } catch (const ScenarioError& e) {
      PyErr_SetString(scenario_error.ptr(), e.what());
    } catch (const UsageError& e) {
      PyErr_SetString(usage_error.ptr(), e.what());
    }
  });

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&FromColumns), py::arg("names"), py::arg("kinds"), py::arg("columns"))
      .def_property_readonly("n_rows", &Dataset::n_rows)
      .def_property_readonly("names", [](const Dataset& ds) {
        std::vector<std::string> out;
        for (const auto& s : ds.specs()) out.push_back(s.name);
        return out;
      })
      .def("kind", [](const Dataset& ds, const std::string& name) {
        return ToString(ds.spec(name).kind);
      })
      .def("column", [](const Dataset& ds, const std::string& name) {
        return ToArray(ds.column(name));
      })
      .def("filter", &Dataset::filter, py::arg("indicator"), py::arg("value"))
      .def("digest", [](const Dataset& ds) { return HexDigest(ds.digest()); })
      .def("describe", [](const Dataset& ds) { return DescribeDataset(ds).dump(); })
      .def("__len__", &Dataset::n_rows);

  m.def("load_csv", [](const std::string& path, const std::string& schema) {
    return LoadCsv(path, LoadSchema(schema));
  }, py::arg("path"), py::arg("schema"));
  m.def("load_criteo", &LoadCriteo, py::arg("path"), py::arg("max_rows") = 0);
  m.def("criteo_like", &CriteoLikeSynthetic, py::arg("n_control"), py::arg("n_treatment"),
        py::arg("seed"));
  m.def("planted_tilt", [](std::size_t n, std::size_t n_treatment, std::vector<double> tilt,
                           std::uint64_t seed) {
    SyntheticSpec spec;
    spec.n = n;
    spec.n_treatment = n_treatment;
    spec.tilt = std::move(tilt);
    spec.seed = seed;
    PlantedTilt p = GeneratePlantedTilt(spec);
    return py::make_tuple(std::move(p.control), std::move(p.treatment), p.truth);
  }, py::arg("n"), py::arg("n_treatment"), py::arg("tilt"), py::arg("seed"));

  m.def("validate_scenario", [](const std::string& text) {
    return ScenarioToJson(ParseScenario(text));
  });

  m.def("solve", [](const Dataset& ds, const std::string& scenario,
                    const std::vector<std::string>& metrics, double threshold) {
    SolverResult solved;
    std::string doc;
    {
      py::gil_scoped_release release;
      doc = RunSolve(ds, ScenarioFrom(scenario), metrics, {}, threshold, &solved).dump();
    }
    return py::make_tuple(doc, ToArray(solved.weights));
  }, py::arg("ds"), py::arg("scenario"), py::arg("metrics"),
     py::arg("threshold") = kDefaultOutlierThreshold);

  m.def("bootstrap", [](const Dataset& ds, const std::string& scenario,
                        const std::vector<std::string>& metrics, std::size_t B,
                        std::size_t m_, std::uint64_t seed, const std::string& mode) {
    py::gil_scoped_release release;
    return RunBootstrap(ds, ScenarioFrom(scenario), metrics, MakePlan(B, m_, seed, mode), {})
        .dump();
  }, py::arg("ds"), py::arg("scenario"), py::arg("metrics"), py::arg("B"), py::arg("m"),
     py::arg("seed"), py::arg("mode") = "bootstrap");

  m.def("diagnose", [](const Dataset& ds, const std::string& scenario, double threshold,
                       const std::vector<std::string>& spread_features,
                       const std::vector<double>& multiples) {
    py::gil_scoped_release release;
    return RunDiagnose(ds, ScenarioFrom(scenario), {}, threshold, spread_features, multiples)
        .dump();
  }, py::arg("ds"), py::arg("scenario"), py::arg("threshold") = kDefaultOutlierThreshold,
     py::arg("spread_features") = std::vector<std::string>{},
     py::arg("multiples") = std::vector<double>{});

  m.def("sweep", [](const Dataset& ds, const std::string& templates,
                    const std::vector<std::vector<double>>& grids, const std::string& metric,
                    const std::string& base, std::size_t B, std::size_t m_,
                    std::uint64_t seed, std::optional<double> level) {
    py::gil_scoped_release release;
    const auto axes = MakeAxes(ParseScenario(templates), grids);
    return RunSweep(ds, axes, metric, ScenarioFrom(base), MakePlan(B, m_, seed, "bootstrap"),
                    {}, level)
        .dump();
  }, py::arg("ds"), py::arg("templates"), py::arg("grids"), py::arg("metric"),
     py::arg("base"), py::arg("B"), py::arg("m"), py::arg("seed"), py::arg("level"));

  m.def("match", [](const Dataset& control, const Dataset& treatment,
                    const std::vector<std::string>& features, const std::string& metric,
                    std::optional<double> caliper, bool accept_nonconverged) {
    py::gil_scoped_release release;
    return RunMatch(control, treatment, features, metric, caliper, accept_nonconverged)
        .dump();
  }, py::arg("control"), py::arg("treatment"), py::arg("features"), py::arg("metric"),
     py::arg("caliper"), py::arg("accept_nonconverged"));

  m.def("criteo_repro", [](const Dataset& ds, std::vector<std::string> features,
                           std::vector<double> targets, std::size_t B, std::size_t m_,
                           std::uint64_t seed, std::size_t match_rows) {
    CriteoOptions opt;
    if (!features.empty()) opt.features = std::move(features);
    if (!targets.empty()) opt.targets = std::move(targets);
    opt.B = B;
    opt.m = m_;
    opt.seed = seed;
    opt.match_rows = match_rows;
    py::gil_scoped_release release;
    return CriteoRepro(ds, opt).document.dump();
  }, py::arg("ds"), py::arg("features"), py::arg("targets"), py::arg("B"), py::arg("m"),
     py::arg("seed"), py::arg("match_rows"));
}
