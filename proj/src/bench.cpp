#include "lmprm/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <tuple>

#include <fmt/format.h>

#include "lmprm/error.hpp"
#include "lmprm/landmarks.hpp"
#include "lmprm/parallel.hpp"
#include "lmprm/random.hpp"
#include "lmprm/search.hpp"

namespace lmprm::bench {

namespace {

// Seed-derivation tags. Every seed in a record is derive_seed(master, {tag, ...}).
constexpr std::uint64_t kTagBugtrap = 1;
constexpr std::uint64_t kTagFraction = 2;
constexpr std::uint64_t kTagClutter = 3;
constexpr std::uint64_t kTagCalibrate = 0xCA11B;
constexpr std::uint64_t kTagQuery = 0x9E7;
constexpr std::uint64_t kTagTable = 0x7AB;

constexpr double kCostTolerance = 1e-9;
constexpr std::size_t kMaxGraphResamples = 32;
constexpr std::size_t kMaxQueryResamples = 1'000'000;

double to_us(std::chrono::nanoseconds t) { return static_cast<double>(t.count()) / 1000.0; }

std::string method_name(const std::string& base, const std::string& objective) {
  return objective == "length" ? base : base + ":" + objective;
}

std::vector<CostObjective> objectives_of(const ExperimentSpec& spec) {
  std::vector<CostObjective> out;
  for (const auto& id : spec.objectives) out.push_back(objective_by_id(id));
  if (out.empty()) throw InvalidArgument("experiment needs at least one objective");
  return out;
}

std::size_t graph_size(const ExperimentSpec& spec, std::size_t index, const Environment& env) {
  if (!spec.graph_sizes.empty()) return spec.graph_sizes.at(index);
  if (!(spec.density > 0.0)) throw InvalidArgument("experiment needs graph sizes or a positive density");
  return static_cast<std::size_t>(std::llround(spec.density * env.mu_free_estimate()));
}

std::size_t size_count(const ExperimentSpec& spec) { return spec.graph_sizes.empty() ? 1 : spec.graph_sizes.size(); }

struct QueryPair {
  VertexId start, goal;
  std::size_t resamples;
};

QueryPair sample_connected_pair(const std::vector<VertexId>& components, std::uint64_t seed) {
  Rng rng(seed);
  const auto n = static_cast<VertexId>(components.size());
  if (n < 2) throw Error("query sampling needs at least two vertices");
  std::uniform_int_distribution<VertexId> pick(0, n - 1);
  for (std::size_t attempt = 0; attempt < kMaxQueryResamples; ++attempt) {
    VertexId s = pick(rng), g = pick(rng);
    if (s != g && components[s] == components[g]) return {s, g, attempt};
  }
  throw Error("could not sample a connected query pair (graph has no edges?)");
}

// Shared fields of every row produced for one query.
struct QueryContext {
  std::string scenario;
  double p_clear = 1.0;
  double lambda = 0.0;
  std::uint64_t env_seed = 0;
  std::size_t n = 0;
  std::uint64_t graph_seed = 0;
  std::size_t query_idx = 0;
  std::uint64_t query_seed = 0;
  std::size_t resamples = 0;
};

ExperimentRecord make_record(const QueryContext& q, const std::string& method, const SearchResult& r) {
  ExperimentRecord rec;
  rec.scenario = q.scenario;
  rec.p_clear = q.p_clear;
  rec.lambda = q.lambda;
  rec.env_seed = q.env_seed;
  rec.n = q.n;
  rec.graph_seed = q.graph_seed;
  rec.query_idx = q.query_idx;
  rec.query_seed = q.query_seed;
  rec.method = method;
  rec.iterations = r.iterations;
  rec.pushes = r.pushes;
  rec.cost = r.cost;
  rec.wall_time_us = to_us(r.wall_time);
  rec.resamples = q.resamples;
  rec.status = r.found() ? "found" : "no_solution";
  return rec;
}

void audit_cost(const SearchResult& reference, const SearchResult& other, const std::string& method) {
  if (reference.found() != other.found())
    throw Error("optimality audit failed: " + method + " disagrees with dijkstra on reachability");
  if (!reference.found()) return;
  const double scale = std::max(1.0, std::abs(reference.cost));
  if (std::abs(reference.cost - other.cost) > kCostTolerance * scale)
    throw Error(fmt::format("optimality audit failed: {} cost {} vs dijkstra {}", method, other.cost, reference.cost));
}

// Dijkstra and (for the length objective) Euclidean A* on one query.
void run_baselines(const RoadmapGraph& graph, const std::string& objective, const QueryContext& q, VertexId s,
                   VertexId g, SearchWorkspace& ws, SearchResult& dijkstra_result,
                   std::vector<ExperimentRecord>& out) {
  dijkstra_result = dijkstra(graph, objective, s, g, &ws);
  out.push_back(make_record(q, method_name("dijkstra", objective), dijkstra_result));
  if (objective == "length") {
    const auto r = astar(graph, objective, s, g, euclidean_heuristic(graph), &ws);
    audit_cost(dijkstra_result, r, "euclidean");
    out.push_back(make_record(q, "euclidean", r));
  }
}

void run_landmark(const RoadmapGraph& graph, const LandmarkTable& table, const QueryContext& q, VertexId s,
                  VertexId g, SearchWorkspace& ws, const SearchResult& reference, std::vector<ExperimentRecord>& out) {
  const LandmarkHeuristic h(table, graph, g);
  const auto r = astar(graph, table.objective_id(), s, g, h, &ws);
  audit_cost(reference, r, "landmark");
  auto rec = make_record(q, method_name("landmark", table.objective_id()), r);
  rec.k = table.landmark_count();
  rec.table_seed = table.seed();
  rec.preprocess_time_us = to_us(table.build_time());
  out.push_back(std::move(rec));
}

LandmarkTable make_table(const RoadmapGraph& graph, const std::string& objective, std::size_t k, std::uint64_t seed,
                         unsigned threads) {
  Rng rng(seed);
  const auto landmarks = select_landmarks(graph.vertex_count(), std::min(k, graph.vertex_count()), rng);
  return build_landmark_table(graph, objective, landmarks, seed, threads);
}

double calibrate_for(const ExperimentSpec& spec, std::uint64_t tag, std::size_t p_index) {
  ClutterSpec cs;
  cs.target_clear = spec.p_clear.at(p_index);
  cs.obstacle_radius = spec.obstacle_radius;
  cs.mc_pairs = spec.calibration_pairs;
  cs.tolerance = spec.calibration_tolerance;
  Rng rng(derive_seed(spec.master_seed, {tag, p_index, kTagCalibrate}));
  return calibrate_intensity(cs, rng);
}

Environment forest_for(const ExperimentSpec& spec, double lambda, std::uint64_t env_seed) {
  Rng rng(env_seed);
  auto env = poisson_forest(lambda, spec.obstacle_radius, Box::cube(2, -1.0, 1.0), rng);
  env.set_seed(env_seed);
  return env;
}

}  // namespace

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::kBugtrap:
      return "bugtrap";
    case Scenario::kFractionSweep:
      return "fraction_sweep";
    case Scenario::kClutterSweep:
      return "clutter_sweep";
    case Scenario::kCustom:
      return "custom";
  }
  return "custom";
}

std::vector<VertexId> component_labels(const RoadmapGraph& graph) {
  const std::size_t n = graph.vertex_count();
  std::vector<VertexId> parent(n);
  std::iota(parent.begin(), parent.end(), VertexId{0});
  auto find = [&](VertexId v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  for (std::size_t u = 0; u < n; ++u)
    for (VertexId v : graph.neighbors(static_cast<VertexId>(u))) {
      VertexId a = find(static_cast<VertexId>(u)), b = find(v);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  for (std::size_t v = 0; v < n; ++v) parent[v] = find(static_cast<VertexId>(v));
  return parent;
}

// ---------------------------------------------------------------------------
// Bug trap

Environment bugtrap_environment() {
  // Cavity interior (-0.2, 0.2) x (-0.19, 0.19); walls 0.02 thick; opening
  // |y| < 0.06 in the -x wall; baffle plate inside, facing the opening.
  std::vector<Obstacle> walls = {
      Rect{{-0.22, 0.19}, {0.22, 0.21}},     // top
      Rect{{-0.22, -0.21}, {0.22, -0.19}},   // bottom
      Rect{{0.20, -0.19}, {0.22, 0.19}},     // back
      Rect{{-0.22, 0.06}, {-0.20, 0.19}},    // front, upper jamb
      Rect{{-0.22, -0.19}, {-0.20, -0.06}},  // front, lower jamb
      Rect{{-0.12, -0.10}, {-0.10, 0.10}},   // baffle
  };
  Environment env(Box::cube(2, -0.5, 0.5), Box::cube(2, -0.5, 0.5), std::move(walls));
  double occupied = 0.0;
  for (const auto& o : env.obstacles()) {
    const auto& r = std::get<Rect>(o);
    occupied += (r.max[0] - r.min[0]) * (r.max[1] - r.min[1]);
  }
  env.set_mu_free(1.0 - occupied, 0);
  return env;
}

Point bugtrap_start() { return {0.0, 0.0}; }
Point bugtrap_goal() { return {0.4, 0.0}; }

ExperimentSpec bugtrap_spec(std::uint64_t seed, bool paper_scale) {
  ExperimentSpec s;
  s.scenario = Scenario::kBugtrap;
  s.environment = bugtrap_environment();
  s.density = 1000.0;
  if (paper_scale) s.graph_sizes = {69'272};
  s.landmark_counts = {100};
  s.repetitions = 5;
  s.start = bugtrap_start();
  s.goal = bugtrap_goal();
  s.master_seed = seed;
  return s;
}

ExperimentSpec fraction_sweep_spec(std::uint64_t seed, bool paper_scale) {
  ExperimentSpec s;
  s.scenario = Scenario::kFractionSweep;
  s.p_clear = {0.05};
  s.graph_sizes = paper_scale ? std::vector<std::size_t>{40'000, 60'000, 80'000}
                              : std::vector<std::size_t>{10'000, 20'000, 40'000};
  s.landmark_counts = {10, 30, 50, 70, 90, 110, 130};
  s.repetitions = paper_scale ? 100 : 10;
  s.master_seed = seed;
  return s;
}

ExperimentSpec clutter_sweep_spec(std::uint64_t seed, bool paper_scale) {
  ExperimentSpec s;
  s.scenario = Scenario::kClutterSweep;
  if (paper_scale) {
    s.p_clear = log_spaced(0.01, 1.0, 20);
    s.density = 100'000.0;
    s.environments = 100;
    s.queries = 100;
    s.landmark_counts = {10, 30, 50, 70, 90, 110, 130, 150, 170};
  } else {
    s.p_clear = log_spaced(0.02, 1.0, 5);
    s.density = 20'000.0;
    s.environments = 5;
    s.queries = 20;
    s.landmark_counts = {10, 50, 90, 130, 170};
  }
  s.master_seed = seed;
  return s;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  if (!(lo > 0.0 && hi >= lo)) throw InvalidArgument("log_spaced needs 0 < lo <= hi");
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<ExperimentRecord> run_bugtrap(const ExperimentSpec& spec) {
  if (!spec.environment) throw InvalidArgument("bugtrap scenario needs an environment");
  if (spec.start.empty() || spec.goal.empty()) throw InvalidArgument("bugtrap scenario needs start and goal");
  const Environment& env = *spec.environment;
  const auto objectives = objectives_of(spec);
  const std::size_t sizes = size_count(spec);

  // Cell = (size index, repetition); each is independent.
  const std::size_t cells = sizes * spec.repetitions;
  std::vector<std::vector<ExperimentRecord>> rows(cells);
  const unsigned inner_threads = cells > 1 ? 1 : spec.threads;
  parallel_for(cells, spec.threads, [&](std::size_t cell) {
    const std::size_t si = cell / spec.repetitions, rep = cell % spec.repetitions;
    const std::size_t n = graph_size(spec, si, env);
    for (std::size_t attempt = 0;; ++attempt) {
      if (attempt >= kMaxGraphResamples) throw Error("bugtrap: start and goal stayed disconnected");
      const std::uint64_t graph_seed = derive_seed(spec.master_seed, {kTagBugtrap, n, rep, attempt});
      BuildOptions opts;
      opts.threads = inner_threads;
      const auto graph = build_prm(env, n, objectives, graph_seed, opts);
      const VertexId s = graph.nearest_vertex(spec.start), g = graph.nearest_vertex(spec.goal);
      const auto comp = component_labels(graph);
      if (comp[s] != comp[g]) continue;

      QueryContext q{scenario_name(spec.scenario), 1.0, 0.0, env.seed(), n, graph_seed, 0, 0, attempt};
      SearchWorkspace ws(graph.vertex_count());
      for (const auto& objective : spec.objectives) {
        SearchResult reference;
        run_baselines(graph, objective, q, s, g, ws, reference, rows[cell]);
        for (std::size_t k : spec.landmark_counts) {
          const auto table =
              make_table(graph, objective, k, derive_seed(graph_seed, {kTagTable, k}), inner_threads);
          run_landmark(graph, table, q, s, g, ws, reference, rows[cell]);
        }
      }
      break;
    }
  });
  std::vector<ExperimentRecord> out;
  for (auto& r : rows) std::move(r.begin(), r.end(), std::back_inserter(out));
  return out;
}

std::vector<ExperimentRecord> run_fraction_sweep(const ExperimentSpec& spec) {
  if (spec.p_clear.size() != 1 && !spec.environment)
    throw InvalidArgument("fraction sweep uses exactly one clutter level");
  if (spec.graph_sizes.empty() || spec.landmark_counts.empty())
    throw InvalidArgument("fraction sweep needs graph sizes and landmark counts");
  const auto objectives = objectives_of(spec);

  double lambda = 0.0, p_clear = 1.0;
  std::uint64_t env_seed = 0;
  Environment env;
  if (spec.environment) {
    env = *spec.environment;
    env_seed = env.seed();
  } else {
    p_clear = spec.p_clear.front();
    lambda = calibrate_for(spec, kTagFraction, 0);
    env_seed = derive_seed(spec.master_seed, {kTagFraction, 0, 0});
    env = forest_for(spec, lambda, env_seed);
  }

  std::vector<ExperimentRecord> out;
  for (std::size_t n : spec.graph_sizes) {
    const std::uint64_t graph_seed = derive_seed(env_seed, {n});
    BuildOptions opts;
    opts.threads = spec.threads;
    const auto graph = build_prm(env, n, objectives, graph_seed, opts);
    const auto comp = component_labels(graph);

    // Cell = (k, repetition): fresh landmarks and one fresh query.
    const std::size_t cells = spec.landmark_counts.size() * spec.repetitions;
    std::vector<std::vector<ExperimentRecord>> rows(cells);
    parallel_for(cells, spec.threads, [&](std::size_t cell) {
      const std::size_t k = spec.landmark_counts[cell / spec.repetitions];
      const std::size_t rep = cell % spec.repetitions;
      const std::uint64_t table_seed = derive_seed(graph_seed, {kTagTable, k, rep});
      const std::uint64_t query_seed = derive_seed(table_seed, {kTagQuery});
      const auto pair = sample_connected_pair(comp, query_seed);
      QueryContext q{scenario_name(spec.scenario), p_clear, lambda, env_seed, n, graph_seed, rep, query_seed,
                     pair.resamples};
      SearchWorkspace ws(graph.vertex_count());
      for (const auto& objective : spec.objectives) {
        SearchResult reference;
        run_baselines(graph, objective, q, pair.start, pair.goal, ws, reference, rows[cell]);
        const auto table = make_table(graph, objective, k, table_seed, 1);
        run_landmark(graph, table, q, pair.start, pair.goal, ws, reference, rows[cell]);
      }
      // Baseline rows carry the cell's k so they can be matched to their landmark row.
      for (auto& r : rows[cell]) r.k = k;
    });
    for (auto& r : rows) std::move(r.begin(), r.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<ExperimentRecord> run_clutter_sweep(const ExperimentSpec& spec) {
  if (spec.p_clear.empty()) throw InvalidArgument("clutter sweep needs a P(clear) grid");
  if (spec.landmark_counts.empty()) throw InvalidArgument("clutter sweep needs landmark counts");
  const auto objectives = objectives_of(spec);
  const std::size_t sizes = size_count(spec);

  std::vector<double> lambdas(spec.p_clear.size());
  for (std::size_t p = 0; p < spec.p_clear.size(); ++p) lambdas[p] = calibrate_for(spec, kTagClutter, p);

  // Cell = (P(clear) index, environment index, size index).
  const std::size_t per_p = spec.environments * sizes;
  const std::size_t cells = spec.p_clear.size() * per_p;
  std::vector<std::vector<ExperimentRecord>> rows(cells);
  const unsigned inner_threads = cells > 1 ? 1 : spec.threads;
  parallel_for(cells, spec.threads, [&](std::size_t cell) {
    const std::size_t p = cell / per_p, e = (cell % per_p) / sizes, si = cell % sizes;
    const std::uint64_t env_seed = derive_seed(spec.master_seed, {kTagClutter, p, e});
    const auto env = forest_for(spec, lambdas[p], env_seed);
    const std::size_t n = graph_size(spec, si, env);
    const std::uint64_t graph_seed = derive_seed(env_seed, {n});
    BuildOptions opts;
    opts.threads = inner_threads;
    const auto graph = build_prm(env, n, objectives, graph_seed, opts);
    const auto comp = component_labels(graph);

    std::vector<QueryPair> pairs;
    std::vector<std::uint64_t> query_seeds;
    for (std::size_t qi = 0; qi < spec.queries; ++qi) {
      query_seeds.push_back(derive_seed(graph_seed, {kTagQuery, qi}));
      pairs.push_back(sample_connected_pair(comp, query_seeds.back()));
    }
    SearchWorkspace ws(graph.vertex_count());
    for (const auto& objective : spec.objectives) {
      std::vector<SearchResult> reference(spec.queries);
      auto context = [&](std::size_t qi) {
        return QueryContext{scenario_name(spec.scenario), spec.p_clear[p], lambdas[p], env_seed,         n,
                            graph_seed,                   qi,             query_seeds[qi], pairs[qi].resamples};
      };
      for (std::size_t qi = 0; qi < spec.queries; ++qi)
        run_baselines(graph, objective, context(qi), pairs[qi].start, pairs[qi].goal, ws, reference[qi], rows[cell]);
      for (std::size_t k : spec.landmark_counts) {
        const auto table = make_table(graph, objective, k, derive_seed(graph_seed, {kTagTable, k}), inner_threads);
        for (std::size_t qi = 0; qi < spec.queries; ++qi)
          run_landmark(graph, table, context(qi), pairs[qi].start, pairs[qi].goal, ws, reference[qi], rows[cell]);
      }
    }
  });
  std::vector<ExperimentRecord> out;
  for (auto& r : rows) std::move(r.begin(), r.end(), std::back_inserter(out));
  return out;
}

std::vector<ExperimentRecord> run(const ExperimentSpec& spec) {
  switch (spec.scenario) {
    case Scenario::kBugtrap:
      return run_bugtrap(spec);
    case Scenario::kFractionSweep:
      return run_fraction_sweep(spec);
    case Scenario::kClutterSweep:
      return run_clutter_sweep(spec);
    case Scenario::kCustom:
      // A custom run with a fixed environment and endpoints behaves like the bug trap;
      // otherwise like a clutter sweep.
      return spec.environment && !spec.start.empty() ? run_bugtrap(spec) : run_clutter_sweep(spec);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Reports

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

bool is_dijkstra(const std::string& method) { return method.rfind("dijkstra", 0) == 0; }

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records) {
  // Reference dijkstra row per (graph_seed, query_seed, objective suffix).
  auto suffix = [](const std::string& method) {
    auto pos = method.find(':');
    return pos == std::string::npos ? std::string() : method.substr(pos);
  };
  std::map<std::tuple<std::uint64_t, std::uint64_t, std::string>, const ExperimentRecord*> reference;
  for (const auto& r : records)
    if (is_dijkstra(r.method)) reference[{r.graph_seed, r.query_seed, suffix(r.method)}] = &r;

  using Key = std::tuple<std::string, double, std::size_t, std::size_t, std::string>;
  struct Acc {
    std::vector<double> iterations, ratios, time_ratios, sizes;
  };
  std::map<Key, Acc> groups;
  for (const auto& r : records) {
    const bool landmark = r.method.rfind("landmark", 0) == 0;
    const bool fraction = r.scenario == "fraction_sweep";
    // Graph size varies with mu_free in density-driven sweeps, so only the
    // fraction sweep keys on n. Baselines there are keyed by their cell's k.
    const std::size_t n_key = fraction ? r.n : 0;
    const std::size_t k_key = landmark || fraction ? r.k : 0;
    auto& acc = groups[Key{r.scenario, r.p_clear, n_key, k_key, r.method}];
    acc.iterations.push_back(static_cast<double>(r.iterations));
    acc.sizes.push_back(static_cast<double>(r.n));
    auto it = reference.find({r.graph_seed, r.query_seed, suffix(r.method)});
    if (it != reference.end() && r.iterations > 0) {
      acc.ratios.push_back(static_cast<double>(it->second->iterations) / static_cast<double>(r.iterations));
      if (r.wall_time_us > 0.0) acc.time_ratios.push_back(it->second->wall_time_us / r.wall_time_us);
    }
  }
  std::vector<SummaryRow> out;
  for (auto& [key, acc] : groups) {
    SummaryRow row;
    std::tie(row.scenario, row.p_clear, row.n, row.k, row.method) = key;
    row.n = static_cast<std::size_t>(
        std::llround(std::accumulate(acc.sizes.begin(), acc.sizes.end(), 0.0) / static_cast<double>(acc.sizes.size())));
    row.queries = acc.iterations.size();
    row.median_iterations = median_of(acc.iterations);
    row.median_iteration_ratio = median_of(acc.ratios);
    row.mean_iteration_ratio =
        acc.ratios.empty() ? 0.0
                           : std::accumulate(acc.ratios.begin(), acc.ratios.end(), 0.0) /
                                 static_cast<double>(acc.ratios.size());
    row.median_time_ratio = median_of(acc.time_ratios);
    out.push_back(std::move(row));
  }
  return out;
}

std::string csv_header() {
  return "scenario,p_clear,lambda,env_seed,n,graph_seed,k,table_seed,query_idx,query_seed,method,iterations,pushes,"
         "cost,wall_time_us,preprocess_time_us,resamples,status\n";
}

std::string to_csv(const std::vector<ExperimentRecord>& records, bool include_timing) {
  std::string out = csv_header();
  for (const auto& r : records) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.scenario, r.p_clear, r.lambda,
                       r.env_seed, r.n, r.graph_seed, r.k, r.table_seed, r.query_idx, r.query_seed, r.method,
                       r.iterations, r.pushes, r.cost, include_timing ? r.wall_time_us : 0.0,
                       include_timing ? r.preprocess_time_us : 0.0, r.resamples, r.status);
  }
  return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out =
      "scenario,p_clear,n,k,method,queries,median_iterations,median_iteration_ratio,mean_iteration_ratio,"
      "median_time_ratio\n";
  for (const auto& r : rows)
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.scenario, r.p_clear, r.n, r.k, r.method, r.queries,
                       r.median_iterations, r.median_iteration_ratio, r.mean_iteration_ratio, r.median_time_ratio);
  return out;
}

void emit_report(const std::vector<ExperimentRecord>& records, const std::filesystem::path& path,
                 bool include_timing) {
  auto write = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + p.string() + "' for writing");
    out << text;
    if (!out) throw Error("write to '" + p.string() + "' failed");
  };
  write(path, to_csv(records, include_timing));
  auto summary_path = path;
  summary_path.replace_extension(".summary.csv");
  auto rows = summarize(records);
  if (!include_timing)
    for (auto& r : rows) r.median_time_ratio = 0.0;
  write(summary_path, summary_csv(rows));
}

}  // namespace lmprm::bench
