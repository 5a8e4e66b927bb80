#include <pybind11/iostream.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <iostream>
#include <sstream>

#include "lmprm/bench.hpp"
#include "lmprm/cli.hpp"
#include "lmprm/env.hpp"
#include "lmprm/error.hpp"
#include "lmprm/landmarks.hpp"
#include "lmprm/roadmap.hpp"
#include "lmprm/search.hpp"

namespace py = pybind11;
using namespace lmprm;

namespace {

std::vector<CostObjective> objectives_from(const std::vector<std::string>& ids) {
  std::vector<CostObjective> out;
  for (const auto& id : ids) out.push_back(objective_by_id(id));
  return out;
}

SearchResult query(const RoadmapGraph& graph, VertexId start, VertexId goal, const std::string& method,
                   const std::string& objective, const LandmarkTable* table) {
  if (method == "dijkstra") return dijkstra(graph, objective, start, goal);
  if (method == "euclidean") return astar(graph, objective, start, goal, EuclideanHeuristic(graph));
  if (method == "landmark") {
    if (!table) throw InvalidArgument("method 'landmark' needs a table");
    return astar(graph, objective, start, goal, LandmarkHeuristic(*table, graph, goal));
  }
  throw InvalidArgument("unknown method '" + method + "'");
}

}  // namespace

PYBIND11_MODULE(_lmprm, m) {
  m.doc() = "Landmark-guided PRM* planning";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<FingerprintMismatch>(m, "FingerprintMismatch", base.ptr());
  py::register_exception<SamplingFailure>(m, "SamplingFailure", base.ptr());
  py::register_exception<CalibrationFailure>(m, "CalibrationFailure", base.ptr());
  py::register_exception<UnknownObjective>(m, "UnknownObjective", base.ptr());

  py::class_<Environment>(m, "Environment")
      .def_property_readonly("dim", &Environment::dim)
      .def_property_readonly("obstacle_count", [](const Environment& e) { return e.obstacles().size(); })
      .def_property_readonly("mu_free", &Environment::mu_free_estimate)
      .def_property_readonly("seed", &Environment::seed)
      .def("point_free", [](const Environment& e, const Point& x) { return e.point_free(x); })
      .def("segment_clear", [](const Environment& e, const Point& p, const Point& q) { return e.segment_clear(p, q); })
      .def("to_json", [](const Environment& e) { return environment_to_json(e); })
      .def("save", [](const Environment& e, const std::filesystem::path& p) { save_environment(e, p); })
      .def_static("load", &load_environment)
      .def_static("from_json", &environment_from_json);

  m.def(
      "poisson_forest",
      [](double intensity, double obstacle_radius, std::uint64_t seed, double window_half) {
        Rng rng(seed);
        auto env = poisson_forest(intensity, obstacle_radius, Box::cube(2, -window_half, window_half), rng);
        env.set_seed(seed);
        return env;
      },
      py::arg("intensity"), py::arg("obstacle_radius") = 0.05, py::arg("seed") = 0, py::arg("window_half") = 1.0);
  m.def("bugtrap_environment", &bench::bugtrap_environment);
  m.def(
      "clear_probability",
      [](double intensity, double obstacle_radius, std::size_t mc_pairs, std::uint64_t seed) {
        Rng rng(seed);
        return clear_probability(intensity, obstacle_radius, mc_pairs, rng);
      },
      py::arg("intensity"), py::arg("obstacle_radius") = 0.05, py::arg("mc_pairs") = 100'000, py::arg("seed") = 0);
  m.def(
      "calibrate_intensity",
      [](double target_clear, double obstacle_radius, std::size_t mc_pairs, double tolerance, std::uint64_t seed) {
        ClutterSpec spec;
        spec.target_clear = target_clear;
        spec.obstacle_radius = obstacle_radius;
        spec.mc_pairs = mc_pairs;
        spec.tolerance = tolerance;
        Rng rng(seed);
        return calibrate_intensity(spec, rng);
      },
      py::arg("target_clear"), py::arg("obstacle_radius") = 0.05, py::arg("mc_pairs") = 100'000,
      py::arg("tolerance") = 0.005, py::arg("seed") = 0);
  m.def("connection_radius", &connection_radius, py::arg("n"), py::arg("dim"), py::arg("mu_free"));

  py::class_<RoadmapGraph>(m, "RoadmapGraph")
      .def_property_readonly("dim", &RoadmapGraph::dim)
      .def_property_readonly("vertex_count", &RoadmapGraph::vertex_count)
      .def_property_readonly("edge_count", &RoadmapGraph::edge_count)
      .def_property_readonly("connection_radius", &RoadmapGraph::connection_radius)
      .def_property_readonly("fingerprint", &RoadmapGraph::fingerprint)
      .def_property_readonly("objectives",
                             [](const RoadmapGraph& g) {
                               std::vector<std::string> ids;
                               for (const auto& w : g.weights()) ids.push_back(w.objective_id);
                               return ids;
                             })
      .def_property_readonly("coords",
                             [](const RoadmapGraph& g) {
                               py::array_t<double> a({g.vertex_count(), g.dim()});
                               std::copy(g.coords().begin(), g.coords().end(), a.mutable_data());
                               return a;
                             })
      .def("neighbors",
           [](const RoadmapGraph& g, VertexId v) {
             if (v >= g.vertex_count()) throw InvalidArgument("vertex out of range");
             const auto adj = g.neighbors(v);
             return std::vector<VertexId>(adj.begin(), adj.end());
           })
      .def("nearest_vertex", [](const RoadmapGraph& g, const Point& x) { return g.nearest_vertex(x); })
      .def("path_cost", [](const RoadmapGraph& g, const std::string& objective,
                           const std::vector<VertexId>& path) { return path_cost(g, objective, path); })
      .def("save", [](const RoadmapGraph& g, const std::filesystem::path& p) { save_graph(g, p); })
      .def_static("load", &load_graph);

  m.def(
      "build_prm",
      [](const Environment& env, std::size_t n, const std::vector<std::string>& objectives, std::uint64_t seed,
         unsigned threads) {
        py::gil_scoped_release release;
        BuildOptions opts;
        opts.threads = threads;
        return build_prm(env, n, objectives_from(objectives), seed, opts);
      },
      py::arg("env"), py::arg("n"), py::arg("objectives") = std::vector<std::string>{"length"}, py::arg("seed") = 0,
      py::arg("threads") = 0);

  py::class_<LandmarkTable>(m, "LandmarkTable")
      .def_property_readonly("objective", &LandmarkTable::objective_id)
      .def_property_readonly("landmarks", &LandmarkTable::landmarks)
      .def_property_readonly("vertex_count", &LandmarkTable::vertex_count)
      .def_property_readonly("symmetric", &LandmarkTable::symmetric)
      .def_property_readonly("build_time_s",
                             [](const LandmarkTable& t) { return std::chrono::duration<double>(t.build_time()).count(); })
      .def("dist_to", &LandmarkTable::dist_to)
      .def("dist_from", &LandmarkTable::dist_from)
      .def("save", [](const LandmarkTable& t, const std::filesystem::path& p) { save_table(t, p); })
      .def_static(
          "load", [](const std::filesystem::path& p, const RoadmapGraph* graph) { return load_table(p, graph); },
          py::arg("path"), py::arg("graph") = nullptr);

  m.def(
      "build_landmark_table",
      [](const RoadmapGraph& graph, std::size_t k, const std::string& objective, std::uint64_t seed,
         unsigned threads) {
        py::gil_scoped_release release;
        Rng rng(seed);
        return build_landmark_table(graph, objective, select_landmarks(graph.vertex_count(), k, rng), seed, threads);
      },
      py::arg("graph"), py::arg("k"), py::arg("objective") = "length", py::arg("seed") = 0, py::arg("threads") = 0);

  m.def(
      "sssp",
      [](const RoadmapGraph& graph, const std::string& objective, VertexId source, bool incoming) {
        return sssp(graph, objective, source, incoming ? Direction::kIncoming : Direction::kOutgoing);
      },
      py::arg("graph"), py::arg("objective"), py::arg("source"), py::arg("incoming") = false);

  py::class_<SearchResult>(m, "SearchResult")
      .def_property_readonly("found", &SearchResult::found)
      .def_readonly("path", &SearchResult::path)
      .def_readonly("cost", &SearchResult::cost)
      .def_readonly("iterations", &SearchResult::iterations)
      .def_readonly("pushes", &SearchResult::pushes)
      .def_property_readonly("wall_time_us",
                             [](const SearchResult& r) { return std::chrono::duration<double, std::micro>(r.wall_time).count(); })
      .def("__repr__", [](const SearchResult& r) {
        std::ostringstream os;
        os << "SearchResult(found=" << (r.found() ? "True" : "False") << ", cost=" << r.cost
           << ", iterations=" << r.iterations << ", path_length=" << r.path.size() << ")";
        return os.str();
      });

  m.def(
      "query",
      [](const RoadmapGraph& graph, VertexId start, VertexId goal, const std::string& method,
         const std::string& objective, const LandmarkTable* table) {
        return query(graph, start, goal, method, objective, table);
      },
      py::arg("graph"), py::arg("start"), py::arg("goal"), py::arg("method") = "dijkstra",
      py::arg("objective") = "length", py::arg("table") = nullptr);

  m.def(
      "heuristic_quality",
      [](const LandmarkTable& table, const RoadmapGraph& graph, std::size_t pairs, std::uint64_t seed) {
        Rng rng(seed);
        const auto q = heuristic_quality(table, graph, table.objective_id(), pairs, rng);
        return py::dict(py::arg("mean") = q.mean, py::arg("median") = q.median, py::arg("min") = q.min,
                        py::arg("pairs") = q.pairs, py::arg("skipped") = q.skipped);
      },
      py::arg("table"), py::arg("graph"), py::arg("pairs") = 1000, py::arg("seed") = 0);

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line; returns (exit_code, stdout, stderr).");
}
