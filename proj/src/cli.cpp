#include "lmprm/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "lmprm/bench.hpp"
#include "lmprm/env.hpp"
#include "lmprm/error.hpp"
#include "lmprm/landmarks.hpp"
#include "lmprm/parallel.hpp"
#include "lmprm/roadmap.hpp"
#include "lmprm/search.hpp"

namespace lmprm::cli {

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string log_level = "info";
};

// Returns the explicit seed or draws one and prints it so the run can be repeated.
std::uint64_t resolve_seed(const Globals& g, std::ostream& err) {
  if (g.seed) return *g.seed;
  std::uint64_t s = (std::uint64_t{std::random_device{}()} << 32) ^ std::random_device{}();
  fmt::print(err, "seed: {}\n", s);
  return s;
}

unsigned resolve_threads(const Globals& g) { return g.threads ? *g.threads : default_threads(); }

Point parse_point(const std::string& text) {
  Point p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      p.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument("cannot parse coordinate list '" + text + "'");
    }
  }
  if (p.empty()) throw InvalidArgument("empty coordinate list");
  return p;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

double us(std::chrono::nanoseconds t) { return static_cast<double>(t.count()) / 1000.0; }

// ---------------------------------------------------------------------------

struct GenEnvArgs {
  std::optional<double> p_clear;
  std::optional<double> lambda;
  double obstacle_radius = 0.05;
  double window_half = 1.0;
  std::size_t dim = 2;
  std::size_t mc_pairs = 100'000;
  double tolerance = 0.002;
  std::string out;
};

int cmd_gen_env(const GenEnvArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  if (a.p_clear.has_value() == a.lambda.has_value()) throw InvalidArgument("give exactly one of --p-clear or --lambda");
  const std::uint64_t seed = resolve_seed(g, err);
  double lambda = a.lambda.value_or(0.0);
  if (a.p_clear) {
    ClutterSpec spec;
    spec.target_clear = *a.p_clear;
    spec.obstacle_radius = a.obstacle_radius;
    spec.mc_pairs = a.mc_pairs;
    spec.tolerance = a.tolerance;
    spec.dim = a.dim;
    Rng calib(derive_seed(seed, {1}));
    lambda = calibrate_intensity(spec, calib);
  }
  Rng rng(derive_seed(seed, {2}));
  auto env = poisson_forest(lambda, a.obstacle_radius, Box::cube(a.dim, -a.window_half, a.window_half), rng);
  env.set_seed(seed);
  save_environment(env, a.out);
  fmt::print(out, "lambda: {}\nobstacles: {}\nmu_free: {}\nwrote {}\n", lambda, env.obstacles().size(),
             env.mu_free_estimate(), a.out);
  return kOk;
}

struct BuildArgs {
  std::string env;
  std::optional<std::size_t> n;
  std::optional<double> density;
  std::string objectives = "length";
  std::string out;
};

int cmd_build(const BuildArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  if (a.n.has_value() == a.density.has_value()) throw InvalidArgument("give exactly one of --n or --density");
  const auto env = load_environment(a.env);
  const std::size_t n =
      a.n ? *a.n : static_cast<std::size_t>(std::llround(*a.density * env.mu_free_estimate()));
  std::vector<CostObjective> objectives;
  for (const auto& id : split_list(a.objectives)) objectives.push_back(objective_by_id(id));
  const std::uint64_t seed = resolve_seed(g, err);
  BuildOptions opts;
  opts.threads = resolve_threads(g);
  const auto t0 = std::chrono::steady_clock::now();
  const auto graph = build_prm(env, n, objectives, seed, opts);
  const auto elapsed = std::chrono::steady_clock::now() - t0;
  save_graph(graph, a.out);
  fmt::print(out, "vertices: {}\nedges: {}\nradius: {}\nbuild_time_ms: {:.3f}\nwrote {}\n", graph.vertex_count(),
             graph.edge_count(), graph.connection_radius(),
             std::chrono::duration<double, std::milli>(elapsed).count(), a.out);
  return kOk;
}

struct LandmarkArgs {
  std::string graph;
  std::size_t k = 0;
  std::string objective = "length";
  std::string out;
};

int cmd_landmarks(const LandmarkArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  const auto graph = load_graph(a.graph);
  const std::uint64_t seed = resolve_seed(g, err);
  Rng rng(seed);
  const auto ids = select_landmarks(graph.vertex_count(), a.k, rng);
  const auto table = build_landmark_table(graph, a.objective, ids, seed, resolve_threads(g));
  save_table(table, a.out);
  const std::size_t matrices = table.symmetric() ? 1 : 2;
  fmt::print(out, "landmarks: {}\nsymmetric: {}\npreprocess_time_ms: {:.3f}\ntable_bytes: {}\nwrote {}\n",
             table.landmark_count(), table.symmetric(), us(table.build_time()) / 1000.0,
             matrices * 8 * table.landmark_count() * table.vertex_count(), a.out);
  return kOk;
}

struct QueryArgs {
  std::string graph;
  std::string start;
  std::string goal;
  std::string method = "dijkstra";
  std::string objective = "length";
  std::string table;
  std::string env;
  bool strict_snap = false;
  bool json = false;
  std::size_t repeat = 1;
};

int cmd_query(const QueryArgs& a, const Globals&, std::ostream& out, std::ostream&) {
  const auto graph = load_graph(a.graph);
  const Point start = parse_point(a.start), goal = parse_point(a.goal);
  const VertexId s = graph.nearest_vertex(start), t = graph.nearest_vertex(goal);
  if (a.strict_snap) {
    if (a.env.empty()) throw InvalidArgument("--strict-snap needs --env");
    const auto env = load_environment(a.env);
    if (!env.segment_clear(start, graph.vertex(s)) || !env.segment_clear(goal, graph.vertex(t)))
      throw InvalidArgument("snap segment collides with an obstacle (--strict-snap)");
  }

  std::optional<LandmarkTable> table;
  std::unique_ptr<Heuristic> h;
  if (a.method == "dijkstra") {
    h = std::make_unique<ZeroHeuristic>();
  } else if (a.method == "euclidean") {
    h = std::make_unique<EuclideanHeuristic>(graph);
  } else if (a.method == "landmark") {
    if (a.table.empty()) throw InvalidArgument("--method landmark needs --table");
    table = load_table(a.table, &graph);
    if (table->objective_id() != a.objective)
      throw InvalidArgument("table was built for objective '" + table->objective_id() + "'");
    h = std::make_unique<LandmarkHeuristic>(*table, graph, t);
  } else {
    throw InvalidArgument("unknown method '" + a.method + "'");
  }

  SearchWorkspace ws(graph.vertex_count());
  SearchResult result;
  std::vector<double> times;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, a.repeat); ++r) {
    result = astar(graph, a.objective, s, t, *h, &ws);
    times.push_back(us(result.wall_time));
  }
  std::sort(times.begin(), times.end());
  const double median_time = times[times.size() / 2];

  if (a.json) {
    nlohmann::ordered_json j;
    j["status"] = result.found() ? "found" : "no_solution";
    j["method"] = a.method;
    j["objective"] = a.objective;
    j["start_vertex"] = s;
    j["goal_vertex"] = t;
    j["cost"] = result.found() ? nlohmann::ordered_json(result.cost) : nlohmann::ordered_json(nullptr);
    j["iterations"] = result.iterations;
    j["pushes"] = result.pushes;
    j["wall_time_us"] = median_time;
    j["path"] = result.path;
    out << j.dump() << "\n";
  } else {
    fmt::print(out, "status: {}\nstart_vertex: {}\ngoal_vertex: {}\n", result.found() ? "found" : "no_solution", s, t);
    if (result.found()) fmt::print(out, "cost: {}\n", result.cost);
    fmt::print(out, "iterations: {}\npushes: {}\nwall_time_us: {:.1f}\npath:", result.iterations, result.pushes,
               median_time);
    for (VertexId v : result.path) fmt::print(out, " {}", v);
    out << "\n";
  }
  return result.found() ? kOk : kNoSolution;
}

struct BenchArgs {
  std::string scenario;
  std::string out;
  bool paper_scale = false;
  bool timing = false;
  std::string sizes, ks, p_clear, objectives;
  std::optional<std::size_t> reps, queries, envs;
  std::optional<double> density;
};

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& s : split_list(text)) {
    try {
      out.push_back(static_cast<std::size_t>(std::stoull(s)));
    } catch (const std::exception&) {
      throw InvalidArgument("cannot parse count list '" + text + "'");
    }
  }
  return out;
}

int cmd_bench(const BenchArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  const std::uint64_t seed = resolve_seed(g, err);
  bench::ExperimentSpec spec;
  if (a.scenario == "bugtrap")
    spec = bench::bugtrap_spec(seed, a.paper_scale);
  else if (a.scenario == "fraction")
    spec = bench::fraction_sweep_spec(seed, a.paper_scale);
  else if (a.scenario == "clutter")
    spec = bench::clutter_sweep_spec(seed, a.paper_scale);
  else
    throw InvalidArgument("unknown scenario '" + a.scenario + "' (bugtrap, fraction, clutter)");
  if (!a.sizes.empty()) spec.graph_sizes = parse_sizes(a.sizes);
  if (!a.ks.empty()) spec.landmark_counts = parse_sizes(a.ks);
  if (!a.p_clear.empty()) {
    spec.p_clear.clear();
    for (const auto& p : split_list(a.p_clear)) spec.p_clear.push_back(std::stod(p));
  }
  if (!a.objectives.empty()) spec.objectives = split_list(a.objectives);
  if (a.reps) spec.repetitions = *a.reps;
  if (a.queries) spec.queries = *a.queries;
  if (a.envs) spec.environments = *a.envs;
  if (a.density) {
    spec.density = *a.density;
    spec.graph_sizes.clear();
  }
  spec.threads = resolve_threads(g);

  const auto records = bench::run(spec);
  bench::emit_report(records, a.out, a.timing);
  fmt::print(out, "records: {}\nwrote {}\n", records.size(), a.out);
  for (const auto& row : bench::summarize(records)) {
    if (row.method.rfind("dijkstra", 0) == 0) continue;
    fmt::print(out, "  p_clear={:<8.4g} n={:<7} k={:<4} {:<16} queries={:<4} median dijkstra/method iterations={:.3f}\n",
               row.p_clear, row.n, row.k, row.method, row.queries, row.median_iteration_ratio);
  }
  return kOk;
}

struct ValidateArgs {
  std::string graph;
  std::string table;
  std::string env;
  std::size_t goals = 5;
  std::size_t queries = 20;
};

int cmd_validate(const ValidateArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  const auto graph = load_graph(a.graph);
  bool ok = true;
  auto report = [&](const std::string& name, bool pass, const std::string& detail) {
    fmt::print(out, "[{}] {}{}{}\n", pass ? "PASS" : "FAIL", name, detail.empty() ? "" : ": ", detail);
    ok = ok && pass;
  };
  // Loading already enforced CSR shape, symmetry and the checksum.
  report("csr", true, fmt::format("{} vertices, {} directed edges", graph.vertex_count(), graph.edge_count()));

  if (graph.has_objective("length")) {
    const auto w = graph.edge_weights("length");
    std::size_t bad = 0;
    for (std::size_t u = 0; u < graph.vertex_count(); ++u)
      for (std::uint64_t e = graph.offsets()[u]; e < graph.offsets()[u + 1]; ++e) {
        const double len = EuclideanHeuristic(graph).evaluate(static_cast<VertexId>(u), graph.neighbors()[e]);
        if (std::abs(w[e] - len) > 1e-12) ++bad;
      }
    report("length-weights", bad == 0, fmt::format("{} mismatched edges", bad));
  }

  if (!a.env.empty()) {
    const auto env = load_environment(a.env);
    std::size_t bad = 0;
    for (std::size_t u = 0; u < graph.vertex_count(); ++u)
      for (VertexId v : graph.neighbors(static_cast<VertexId>(u))) {
        if (v < u) continue;
        const auto pu = graph.vertex(static_cast<VertexId>(u)), pv = graph.vertex(v);
        double d2 = 0.0;
        for (std::size_t i = 0; i < pu.size(); ++i) d2 += (pu[i] - pv[i]) * (pu[i] - pv[i]);
        if (!env.segment_clear(pu, pv) || !(std::sqrt(d2) < graph.connection_radius())) ++bad;
      }
    report("edge-collision", bad == 0, fmt::format("{} invalid edges", bad));
  }

  Rng rng(g.seed.value_or(0x5EED));
  const auto n = static_cast<VertexId>(graph.vertex_count());
  std::uniform_int_distribution<VertexId> pick(0, n == 0 ? 0 : n - 1);
  std::optional<LandmarkTable> table;
  if (!a.table.empty()) {
    try {
      table = load_table(a.table, &graph);
      report("fingerprint", true, "");
    } catch (const FingerprintMismatch& e) {
      report("fingerprint", false, e.what());
    }
  }

  if (n > 0 && !graph.weights().empty()) {
    const std::string obj = table ? table->objective_id() : graph.weights().front().objective_id;
    std::size_t bad = 0;
    SearchWorkspace ws(n);
    for (std::size_t q = 0; q < a.queries; ++q) {
      const VertexId s = pick(rng), t = pick(rng);
      const auto ref = sssp(graph, obj, s, Direction::kOutgoing);
      const auto d = dijkstra(graph, obj, s, t, &ws);
      if ((ref[t] == kInfinity) == d.found() || (d.found() && d.cost != ref[t])) ++bad;
      if (obj == "length") {
        const auto e = astar(graph, obj, s, t, EuclideanHeuristic(graph), &ws);
        if (e.found() != d.found() || (d.found() && std::abs(e.cost - d.cost) > 1e-9 * std::max(1.0, d.cost))) ++bad;
      }
      if (table) {
        const LandmarkHeuristic h(*table, graph, t);
        const auto l = astar(graph, obj, s, t, h, &ws);
        if (l.found() != d.found() || (d.found() && std::abs(l.cost - d.cost) > 1e-9 * std::max(1.0, d.cost))) ++bad;
      }
    }
    report("oracle-equivalence", bad == 0, fmt::format("{} disagreements over {} queries", bad, a.queries));
  }

  if (table) {
    const std::string& obj = table->objective_id();
    std::size_t exact_bad = 0;
    for (std::size_t l = 0; l < table->landmark_count(); ++l) {
      const auto row = sssp(graph, obj, table->landmarks()[l], Direction::kOutgoing);
      for (VertexId v = 0; v < n; ++v)
        if (row[v] != table->dist_to(l, v)) ++exact_bad;
    }
    report("table-exact", exact_bad == 0, fmt::format("{} entries differ from recomputed SSSP", exact_bad));

    std::size_t inadmissible = 0, inconsistent = 0;
    const auto w = graph.edge_weights(obj);
    for (std::size_t q = 0; q < a.goals && n > 0; ++q) {
      const VertexId goal = pick(rng);
      const LandmarkHeuristic h(*table, graph, goal);
      const auto d = sssp(graph, obj, goal, Direction::kIncoming);
      for (VertexId x = 0; x < n; ++x) {
        const double hx = h.evaluate(x, goal);
        if (d[x] != kInfinity && hx > d[x] + 1e-9 * std::max(1.0, d[x])) ++inadmissible;
        if (!table->symmetric() || hx == kInfinity) continue;
        for (std::uint64_t e = graph.offsets()[x]; e < graph.offsets()[x + 1]; ++e)
          if (hx > w[e] + h.evaluate(graph.neighbors()[e], goal) + 1e-9 * std::max(1.0, hx)) ++inconsistent;
      }
    }
    report("admissibility", inadmissible == 0, fmt::format("{} violations over {} goals", inadmissible, a.goals));
    if (table->symmetric())
      report("consistency", inconsistent == 0, fmt::format("{} violating edges", inconsistent));
  }
  (void)err;
  return ok ? kOk : kValidationFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Landmark-guided PRM* planning: environments, roadmaps, landmark tables, queries, benchmarks", "lmprm"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed_value = 0;
  unsigned threads_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "RNG seed (printed when omitted)");
  auto* threads_opt = app.add_option("--threads", threads_value, "Worker threads (default: LMPRM_THREADS or all cores)");
  app.add_option("--log-level", g.log_level, "quiet | info")->check(CLI::IsMember({"quiet", "info"}));
  seed_opt->configurable();
  threads_opt->check(CLI::PositiveNumber);

  GenEnvArgs gen;
  auto* c_gen = app.add_subcommand("gen-env", "Generate a calibrated Poisson-forest environment");
  {
    auto* p = c_gen->add_option("--p-clear", "Target probability that a random segment is clear");
    p->each([&](const std::string& v) { gen.p_clear = std::stod(v); });
    auto* l = c_gen->add_option("--lambda", "Obstacle intensity (obstacles per unit area)");
    l->each([&](const std::string& v) { gen.lambda = std::stod(v); });
    c_gen->add_option("--obstacle-radius", gen.obstacle_radius, "Obstacle radius")->capture_default_str();
    c_gen->add_option("--window", gen.window_half, "Half-width of the obstacle window")->capture_default_str();
    c_gen->add_option("--dim", gen.dim, "Dimension")->capture_default_str();
    c_gen->add_option("--mc-pairs", gen.mc_pairs, "Monte-Carlo pairs for calibration")->capture_default_str();
    c_gen->add_option("--tolerance", gen.tolerance, "Calibration tolerance")->capture_default_str();
    c_gen->add_option("--out", gen.out, "Output environment JSON")->required();
  }

  BuildArgs build;
  auto* c_build = app.add_subcommand("build", "Build a PRM* roadmap");
  {
    c_build->add_option("--env", build.env, "Environment JSON")->required();
    c_build->add_option("--n", "Vertex count")->each([&](const std::string& v) { build.n = std::stoull(v); });
    c_build->add_option("--density", "Vertices per unit free area")->each([&](const std::string& v) {
      build.density = std::stod(v);
    });
    c_build->add_option("--objectives", build.objectives, "Comma-separated objective ids")->capture_default_str();
    c_build->add_option("--out", build.out, "Output graph file")->required();
  }

  LandmarkArgs lm;
  auto* c_lm = app.add_subcommand("landmarks", "Build a landmark distance table");
  {
    c_lm->add_option("--graph", lm.graph, "Graph file")->required();
    c_lm->add_option("--k", lm.k, "Number of landmarks")->required();
    c_lm->add_option("--objective", lm.objective, "Objective id")->capture_default_str();
    c_lm->add_option("--out", lm.out, "Output table file")->required();
  }

  QueryArgs query;
  auto* c_query = app.add_subcommand("query", "Answer a shortest-path query");
  {
    c_query->add_option("--graph", query.graph, "Graph file")->required();
    c_query->add_option("--start", query.start, "Start coordinates x,y,...")->required();
    c_query->add_option("--goal", query.goal, "Goal coordinates x,y,...")->required();
    c_query->add_option("--method", query.method, "dijkstra | euclidean | landmark")
        ->check(CLI::IsMember({"dijkstra", "euclidean", "landmark"}))
        ->capture_default_str();
    c_query->add_option("--objective", query.objective, "Objective id")->capture_default_str();
    c_query->add_option("--table", query.table, "Landmark table (method landmark)");
    c_query->add_option("--env", query.env, "Environment (for --strict-snap)");
    c_query->add_flag("--strict-snap", query.strict_snap, "Reject snaps whose segment collides");
    c_query->add_flag("--json", query.json, "Machine-readable output");
    c_query->add_option("--repeat", query.repeat, "Repeat the search and report the median time")
        ->capture_default_str();
  }

  BenchArgs bench_args;
  auto* c_bench = app.add_subcommand("bench", "Run a benchmark scenario and write CSV");
  {
    c_bench->add_option("--scenario", bench_args.scenario, "bugtrap | fraction | clutter")
        ->required()
        ->check(CLI::IsMember({"bugtrap", "fraction", "clutter"}));
    c_bench->add_option("--out", bench_args.out, "Output CSV")->required();
    c_bench->add_flag("--paper-scale", bench_args.paper_scale, "Use the published trial sizes");
    c_bench->add_flag("--timing", bench_args.timing, "Write measured times (CSV no longer reproducible)");
    c_bench->add_option("--sizes", bench_args.sizes, "Override graph sizes (comma-separated)");
    c_bench->add_option("--ks", bench_args.ks, "Override landmark counts (comma-separated)");
    c_bench->add_option("--p-clear", bench_args.p_clear, "Override P(clear) grid (comma-separated)");
    c_bench->add_option("--objectives", bench_args.objectives, "Override objectives (comma-separated)");
    c_bench->add_option("--reps", "Override repetitions")->each([&](const std::string& v) {
      bench_args.reps = std::stoull(v);
    });
    c_bench->add_option("--queries", "Override queries per cell")->each([&](const std::string& v) {
      bench_args.queries = std::stoull(v);
    });
    c_bench->add_option("--envs", "Override environments per P(clear)")->each([&](const std::string& v) {
      bench_args.envs = std::stoull(v);
    });
    c_bench->add_option("--density", "Override vertex density (replaces sizes)")->each([&](const std::string& v) {
      bench_args.density = std::stod(v);
    });
  }

  ValidateArgs val;
  auto* c_val = app.add_subcommand("validate", "Audit a graph (and optional table)");
  {
    c_val->add_option("--graph", val.graph, "Graph file")->required();
    c_val->add_option("--table", val.table, "Landmark table file");
    c_val->add_option("--env", val.env, "Environment JSON (enables the edge collision audit)");
    c_val->add_option("--goals", val.goals, "Goals for the admissibility audit")->capture_default_str();
    c_val->add_option("--queries", val.queries, "Queries for the oracle audit")->capture_default_str();
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  if (*seed_opt) g.seed = seed_value;
  if (*threads_opt) g.threads = threads_value;

  // --log-level quiet drops progress output; query results and audits are always printed.
  std::ostream null_stream(nullptr);
  std::ostream& info = g.log_level == "quiet" ? null_stream : out;
  try {
    if (*c_gen) return cmd_gen_env(gen, g, info, err);
    if (*c_build) return cmd_build(build, g, info, err);
    if (*c_lm) return cmd_landmarks(lm, g, info, err);
    if (*c_query) return cmd_query(query, g, out, err);
    if (*c_bench) return cmd_bench(bench_args, g, info, err);
    if (*c_val) return cmd_validate(val, g, out, err);
  } catch (const FormatError& e) {
    fmt::print(err, "format error: {}\n", e.what());
    return kFormatError;
  } catch (const FingerprintMismatch& e) {
    fmt::print(err, "format error: {}\n", e.what());
    return kFormatError;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kFailure;
  }
  return kFailure;
}

}  // namespace lmprm::cli
