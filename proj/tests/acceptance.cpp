// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "lmprm/bench.hpp"
#include "lmprm/cli.hpp"
#include "lmprm/env.hpp"
#include "lmprm/landmarks.hpp"
#include "lmprm/roadmap.hpp"
#include "lmprm/search.hpp"
#include "oracles.hpp"

using namespace lmprm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

Environment empty_unit_env() {
  Environment env(Box::cube(2, -0.5, 0.5), Box::cube(2, -0.5, 0.5), {});
  env.set_mu_free(1.0, 0);
  return env;
}

const std::vector<CostObjective> kBoth{length_objective(), work_objective()};

// 1. Landmark A* and Dijkstra agree and both match Bellman-Ford.
Outcome optimality_oracle() {
  std::size_t queries = 0, mismatches = 0;
  const std::vector<std::size_t> ks{0, 10, 50, 150};
  for (std::uint64_t gi = 0; gi < 10; ++gi) {
    Rng rng(derive_seed(101, {gi}));
    const auto env = poisson_forest(10.0 + 8.0 * static_cast<double>(gi), 0.05, Box::cube(2, -1.0, 1.0), rng, 20'000);
    const auto graph = build_prm(env, 250 + 25 * gi, kBoth, derive_seed(102, {gi}));
    std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(graph.vertex_count() - 1));
    SearchWorkspace ws(graph.vertex_count());
    for (const std::string objective : {"length", "work"}) {
      for (std::size_t k : ks) {
        const auto table = build_landmark_table(graph, objective, select_landmarks(graph.vertex_count(), k, rng));
        for (int q = 0; q < 13; ++q) {
          const VertexId s = pick(rng), t = pick(rng);
          const auto bf = oracle::bellman_ford(graph, objective, s);
          const auto d = dijkstra(graph, objective, s, t, &ws);
          const auto l = astar(graph, objective, s, t, LandmarkHeuristic(table, graph, t), &ws);
          ++queries;
          const bool reachable = bf[t] != oracle::kInf;
          if (d.found() != reachable || l.found() != reachable) {
            ++mismatches;
            continue;
          }
          if (!reachable) continue;
          if (!close(l.cost, d.cost, 1e-9) || !close(d.cost, bf[t], 1e-9) || !close(l.cost, bf[t], 1e-9) ||
              !close(path_cost(graph, objective, l.path), l.cost, 1e-9))
            ++mismatches;
        }
      }
    }
  }
  return {queries >= 500 && mismatches == 0,
          fmt::format("{} queries on graphs of 250-475 vertices, {} mismatches", queries, mismatches)};
}

// 2. Admissibility on both objectives, consistency on the symmetric one.
Outcome admissibility_consistency() {
  std::size_t pairs = 0, inadmissible = 0, inconsistent = 0;
  for (std::uint64_t gi = 0; gi < 10; ++gi) {
    Rng rng(derive_seed(201, {gi}));
    const auto env = poisson_forest(5.0 * static_cast<double>(gi), 0.05, Box::cube(2, -1.0, 1.0), rng, 20'000);
    const auto graph = build_prm(env, 1000, kBoth, derive_seed(202, {gi}));
    std::uniform_int_distribution<VertexId> pick(0, 999);
    SearchWorkspace ws(graph.vertex_count());
    for (const std::string objective : {"length", "work"}) {
      const auto table = build_landmark_table(graph, objective, select_landmarks(1000, 16, rng));
      const auto w = graph.edge_weights(objective);
      for (int p = 0; p < 1000; ++p) {
        const VertexId x = pick(rng), g = pick(rng);
        const LandmarkHeuristic h(table, graph, g);
        const double hx = h.evaluate(x, g);
        const auto d = dijkstra(graph, objective, x, g, &ws);
        ++pairs;
        if (d.found() ? hx > d.cost + 1e-9 * std::max(1.0, d.cost) : hx != kInfinity) ++inadmissible;
        if (!graph.objective_symmetric(objective) || hx == kInfinity) continue;
        for (std::uint64_t e = graph.offsets()[x]; e < graph.offsets()[x + 1]; ++e)
          if (hx > w[e] + h.evaluate(graph.neighbors()[e], g) + 1e-9 * std::max(1.0, hx)) ++inconsistent;
      }
    }
  }
  return {inadmissible == 0 && inconsistent == 0,
          fmt::format("{} pairs on 10 PRMs of 1000 vertices, {} admissibility and {} consistency violations", pairs,
                      inadmissible, inconsistent)};
}

// Medians of per-query dijkstra/method iteration ratios keyed by method.
std::map<std::string, std::vector<double>> ratios_by_method(const std::vector<bench::ExperimentRecord>& records) {
  std::map<std::pair<std::uint64_t, std::uint64_t>, double> base;
  for (const auto& r : records)
    if (r.method == "dijkstra") base[{r.graph_seed, r.query_seed}] = static_cast<double>(r.iterations);
  std::map<std::string, std::vector<double>> out;
  for (const auto& r : records)
    if (r.method != "dijkstra")
      out[r.method].push_back(base.at({r.graph_seed, r.query_seed}) / static_cast<double>(r.iterations));
  return out;
}

// 3. Bug trap ordering and speedup.
Outcome bugtrap() {
  const auto spec = bench::bugtrap_spec(303);
  const auto records = bench::run(spec);
  std::map<std::string, std::vector<double>> iters;
  for (const auto& r : records) iters[r.method].push_back(static_cast<double>(r.iterations));
  const double dij = median(iters["dijkstra"]), euc = median(iters["euclidean"]), lm = median(iters["landmark"]);
  const double ratio = median(ratios_by_method(records)["landmark"]);
  const bool pass = lm < euc && euc <= 1.01 * dij && ratio >= 5.0;
  return {pass, fmt::format("n={}, k=100, {} reps: median iterations landmark {} < euclidean {} <= 1.01 x dijkstra {}; "
                            "dijkstra/landmark {:.2f} (>= 5)",
                            records.front().n, spec.repetitions, lm, euc, dij, ratio)};
}

// 4. High-clutter separation between landmark and Euclidean heuristics.
Outcome clutter_sweep() {
  auto spec = bench::clutter_sweep_spec(404);
  spec.p_clear = {0.02, 0.05};
  spec.graph_sizes = {20'000};
  spec.landmark_counts = {90};
  spec.environments = 5;
  spec.queries = 10;
  const auto records = bench::run(spec);
  bool pass = true;
  std::string detail;
  for (double p : spec.p_clear) {
    std::vector<bench::ExperimentRecord> cell;
    std::copy_if(records.begin(), records.end(), std::back_inserter(cell), [&](const auto& r) { return r.p_clear == p; });
    auto ratios = ratios_by_method(cell);
    const double lm = median(ratios["landmark"]), euc = median(ratios["euclidean"]);
    const bool ok = ratios["landmark"].size() >= 50 && lm >= 5.0 && lm >= 2.0 * euc;
    pass = pass && ok;
    detail += fmt::format("{}P(clear)={}: {} queries, dijkstra/landmark {:.2f}, dijkstra/euclidean {:.2f}",
                          detail.empty() ? "" : "; ", p, ratios["landmark"].size(), lm, euc);
  }
  return {pass, "n=20000, k=90: " + detail};
}

// 5. Heuristic quality at a fixed landmark fraction improves with n.
Outcome lemma_convergence() {
  const auto env = empty_unit_env();
  const std::vector<std::size_t> sizes{5'000, 20'000, 80'000};
  std::vector<double> means;
  for (std::size_t n : sizes) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto graph = build_prm(env, n, std::vector<CostObjective>{length_objective()}, derive_seed(505, {n, seed}));
      Rng rng(derive_seed(506, {n, seed}));
      const std::size_t k = static_cast<std::size_t>(std::llround(0.002 * static_cast<double>(n)));
      const auto table = build_landmark_table(graph, "length", select_landmarks(n, k, rng));
      total += heuristic_quality(table, graph, "length", 1000, rng).mean;
    }
    means.push_back(total / 10.0);
  }
  const bool pass = means[0] < means[1] && means[1] < means[2] && means[2] > 0.9;
  return {pass, fmt::format("mean h/d at k/n=0.002: n=5000 {:.4f}, n=20000 {:.4f}, n=80000 {:.4f} (> 0.9)", means[0],
                            means[1], means[2])};
}

// 6. Calibration round trip and the analytic Poisson reduction.
Outcome calibration() {
  bool pass = true;
  std::string detail;
  double worst_series = 0.0;
  for (double target : {0.05, 0.5}) {
    ClutterSpec spec;
    spec.target_clear = target;
    spec.obstacle_radius = 0.05;
    Rng calib(derive_seed(606, {static_cast<std::uint64_t>(target * 1000)}));
    const double lambda = calibrate_intensity(spec, calib);
    Rng fresh(derive_seed(607, {static_cast<std::uint64_t>(target * 1000)}));
    const double p = clear_probability(lambda, 0.05, 100'000, fresh);
    pass = pass && std::abs(p - target) <= 0.02;
    detail += fmt::format("target {} -> lambda {:.4f} -> re-estimated {:.4f}; ", target, lambda, p);

    const std::vector<std::pair<Point, Point>> fixed{
        {{0.0, 0.0}, {0.0, 0.0}}, {{-0.5, -0.5}, {0.5, 0.5}}, {{-0.3, 0.1}, {0.2, -0.4}}, {{0.1, 0.1}, {0.1, 0.35}}};
    for (const auto& [z1, z2] : fixed) {
      const double len = oracle::distance(z1, z2);
      const double analytic = clear_probability_given_length(2, lambda, 0.05, len);
      const double series = oracle::clear_probability_series(lambda, 4.0, 0.05, len, 3000);
      worst_series = std::max(worst_series, std::abs(analytic - series));
    }
  }
  pass = pass && worst_series <= 1e-6;
  return {pass, detail + fmt::format("max |analytic - series| = {:.2e}", worst_series)};
}

// 7. Table build time linear in k; file size 8 k n bytes per matrix.
Outcome complexity_memory() {
  Rng rng(707);
  const auto env = poisson_forest(10.0, 0.05, Box::cube(2, -1.0, 1.0), rng, 20'000);
  const std::size_t n = 20'000;
  const auto graph = build_prm(env, n, kBoth, 708);
  auto build_time = [&](std::size_t k) {
    std::vector<double> times;
    for (int rep = 0; rep < 5; ++rep) {
      const auto ids = select_landmarks(n, k, rng);
      const auto t0 = std::chrono::steady_clock::now();
      const auto table = build_landmark_table(graph, "length", ids, 0, 1);
      times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return median(times);
  };
  build_time(10);  // warm-up
  const double t10 = build_time(10), t100 = build_time(100);
  const double ratio = t100 / t10;

  oracle::TempDir dir;
  double worst_size = 0.0;
  for (const std::string objective : {"length", "work"}) {
    for (std::size_t k : {10u, 100u}) {
      const auto table = build_landmark_table(graph, objective, select_landmarks(n, k, rng));
      save_table(table, dir / "t.lmrk");
      const double matrices = graph.objective_symmetric(objective) ? 1.0 : 2.0;
      const double expected = matrices * 8.0 * static_cast<double>(k * n);
      const double size = static_cast<double>(std::filesystem::file_size(dir / "t.lmrk"));
      worst_size = std::max(worst_size, std::abs(size - expected) / expected);
    }
  }
  const bool pass = ratio >= 7.0 && ratio <= 13.0 && worst_size <= 0.10;
  return {pass, fmt::format("n={}: build k=10 {:.1f} ms, k=100 {:.1f} ms, ratio {:.2f} (in [7, 13]); "
                            "worst file size deviation {:.4f}% (<= 10%)",
                            n, 1e3 * t10, 1e3 * t100, ratio, 100.0 * worst_size)};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 8. Byte-identical benchmark CSVs and bit-exact file round trips.
Outcome determinism() {
  oracle::TempDir dir;
  std::ostringstream sink;
  const std::vector<std::vector<std::string>> runs{
      {"bench", "--scenario", "bugtrap"},
      {"bench", "--scenario", "fraction", "--sizes", "5000", "--ks", "10,50", "--reps", "3"},
      {"bench", "--scenario", "clutter", "--sizes", "3000", "--ks", "10,50", "--envs", "2", "--queries", "5",
       "--p-clear", "0.05,0.5", "--objectives", "length,work"}};
  bool pass = true;
  std::size_t compared = 0;
  for (const auto& base : runs) {
    std::vector<std::string> texts;
    for (int attempt = 0; attempt < 2; ++attempt) {
      auto args = base;
      args.insert(args.begin(), {"--seed", "808"});
      const std::string out = dir / fmt::format("run{}.csv", attempt);
      args.insert(args.end(), {"--out", out});
      if (cli::run(args, sink, sink) != 0) return {false, "bench run failed: " + sink.str()};
      texts.push_back(slurp(out));
    }
    pass = pass && texts[0] == texts[1] && texts[0].size() > 200;
    ++compared;
  }

  const auto graph = build_prm(poisson_forest(20.0, 0.05, Box::cube(2, -1.0, 1.0), *std::make_unique<Rng>(809)),
                               2000, kBoth, 810);
  save_graph(graph, dir / "g.prmg");
  const auto graph_bytes = slurp(dir / "g.prmg");
  save_graph(load_graph(dir / "g.prmg"), dir / "g2.prmg");
  const bool graph_ok = graph_bytes == slurp(dir / "g2.prmg");

  bool table_ok = true;
  for (const std::string objective : {"length", "work"}) {
    Rng rng(811);
    const auto table = build_landmark_table(graph, objective, select_landmarks(2000, 20, rng), 812);
    save_table(table, dir / "t.lmrk");
    save_table(load_table(dir / "t.lmrk", &graph), dir / "t2.lmrk");
    table_ok = table_ok && slurp(dir / "t.lmrk") == slurp(dir / "t2.lmrk");
  }
  pass = pass && graph_ok && table_ok;
  return {pass, fmt::format("{} bench scenarios run twice byte-identical; graph round trip {}, table round trips {}",
                            compared, graph_ok ? "exact" : "DIFFERS", table_ok ? "exact" : "DIFFER")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"optimality oracle", optimality_oracle},
      {"admissibility/consistency", admissibility_consistency},
      {"bug-trap reproduction", bugtrap},
      {"clutter sweep separation", clutter_sweep},
      {"landmark heuristic convergence", lemma_convergence},
      {"calibration round trip", calibration},
      {"table build complexity and memory", complexity_memory},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << fmt::format("[{}] criterion {}: {} ({:.1f} s) - {}", o.pass ? "PASS" : "FAIL", i + 1,
                             criteria[i].first, secs, o.detail)
              << std::endl;
    if (!o.pass) ++failures;
  }
  std::cout << fmt::format("{} of {} acceptance criteria passed", criteria.size() - failures, criteria.size())
            << std::endl;
  return failures == 0 ? 0 : 1;
}
