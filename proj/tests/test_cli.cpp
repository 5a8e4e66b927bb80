#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lmprm/bench.hpp"
#include "lmprm/cli.hpp"
#include "lmprm/landmarks.hpp"
#include "oracles.hpp"

using namespace lmprm;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("gen-env") {
  oracle::TempDir dir;
  REQUIRE(invoke({"--seed", "1", "gen-env", "--p-clear", "1.0", "--out", dir / "a.json"}).code == 0);
  CHECK(load_environment(dir / "a.json").obstacles().empty());
  REQUIRE(invoke({"--seed", "1", "gen-env", "--lambda", "0", "--out", dir / "b.json"}).code == 0);
  CHECK(load_environment(dir / "b.json").obstacles().empty());

  REQUIRE(invoke({"--seed", "7", "gen-env", "--p-clear", "0.5", "--out", dir / "c.json", "--mc-pairs", "20000",
               "--tolerance", "0.01"})
              .code == 0);
  REQUIRE(invoke({"--seed", "7", "gen-env", "--p-clear", "0.5", "--out", dir / "d.json", "--mc-pairs", "20000",
               "--tolerance", "0.01"})
              .code == 0);
  CHECK(slurp(dir / "c.json") == slurp(dir / "d.json"));
  CHECK_FALSE(load_environment(dir / "c.json").obstacles().empty());

  const auto unseeded = invoke({"gen-env", "--lambda", "5", "--out", dir / "e.json"});
  CHECK(unseeded.code == 0);
  CHECK(unseeded.err.find("seed: ") != std::string::npos);
  CHECK(invoke({"gen-env", "--out", dir / "f.json"}).code == cli::kFailure);
}

TEST_CASE("build, landmarks, query, validate pipeline") {
  oracle::TempDir dir;
  const std::string env = dir / "env.json", graph = dir / "g.prmg", table = dir / "t.lmrk";
  REQUIRE(invoke({"--seed", "3", "gen-env", "--lambda", "40", "--out", env}).code == 0);

  const auto built = invoke({"--seed", "5", "build", "--env", env, "--n", "3000", "--objectives", "length,work",
                          "--out", graph});
  REQUIRE(built.code == 0);
  CHECK(built.out.find("vertices: 3000") != std::string::npos);
  REQUIRE(invoke({"--seed", "5", "build", "--env", env, "--n", "3000", "--objectives", "length,work", "--out",
               dir / "g2.prmg"})
              .code == 0);
  CHECK(slurp(graph) == slurp(dir / "g2.prmg"));

  REQUIRE(invoke({"--seed", "9", "landmarks", "--graph", graph, "--k", "20", "--out", table}).code == 0);
  REQUIRE(invoke({"--seed", "9", "landmarks", "--graph", graph, "--k", "0", "--out", dir / "t0.lmrk"}).code == 0);
  CHECK(load_table(dir / "t0.lmrk").landmark_count() == 0);

  auto query = [&](const std::string& method, const std::string& start, const std::string& goal) {
    auto r = invoke({"query", "--graph", graph, "--start", start, "--goal", goal, "--method", method, "--table", table,
                  "--json"});
    return std::make_pair(r.code, r.code == 0 ? nlohmann::json::parse(r.out) : nlohmann::json());
  };
  const auto [dc, d] = query("dijkstra", "-0.4,-0.4", "0.4,0.4");
  const auto [lc, l] = query("landmark", "-0.4,-0.4", "0.4,0.4");
  const auto [ec, e] = query("euclidean", "-0.4,-0.4", "0.4,0.4");
  if (dc == 0) {
    REQUIRE(lc == 0);
    CHECK(l["cost"].get<double>() == doctest::Approx(d["cost"].get<double>()).epsilon(1e-9));
    CHECK(e["cost"].get<double>() == doctest::Approx(d["cost"].get<double>()).epsilon(1e-9));
    CHECK(l["iterations"].get<std::size_t>() <= d["iterations"].get<std::size_t>());
    CHECK(d["path"].size() >= 2);
  } else {
    CHECK(dc == cli::kNoSolution);
  }
  const auto [sc, same] = query("landmark", "0.1,0.1", "0.1,0.1");
  REQUIRE(sc == 0);
  CHECK(same["cost"].get<double>() == 0.0);

  CHECK(invoke({"query", "--graph", graph, "--start", "0,0", "--goal", "0.1,0.1", "--method", "landmark"}).code ==
        cli::kFailure);

  const auto ok = invoke({"validate", "--graph", graph, "--table", table, "--env", env});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("FAIL") == std::string::npos);
  CHECK(ok.out.find("[PASS] admissibility") != std::string::npos);
  CHECK(ok.out.find("[PASS] consistency") != std::string::npos);
}

TEST_CASE("landmark iterations do not exceed dijkstra's in the median on a cluttered roadmap") {
  oracle::TempDir dir;
  const std::string env = dir / "env.json", graph = dir / "g.prmg", table = dir / "t.lmrk";
  REQUIRE(invoke({"--seed", "11", "gen-env", "--p-clear", "0.1", "--mc-pairs", "20000", "--tolerance", "0.01", "--out",
               env})
              .code == 0);
  REQUIRE(invoke({"--seed", "12", "build", "--env", env, "--n", "4000", "--out", graph}).code == 0);
  REQUIRE(invoke({"--seed", "13", "landmarks", "--graph", graph, "--k", "30", "--out", table}).code == 0);
  Rng rng(1);
  std::uniform_real_distribution<double> u(-0.45, 0.45);
  int better = 0, total = 0;
  for (int q = 0; q < 21; ++q) {
    const std::string s = std::to_string(u(rng)) + "," + std::to_string(u(rng));
    const std::string g = std::to_string(u(rng)) + "," + std::to_string(u(rng));
    const auto d = invoke({"query", "--graph", graph, "--start", s, "--goal", g, "--json", "--repeat", "20"});
    const auto l = invoke({"query", "--graph", graph, "--start", s, "--goal", g, "--json", "--method", "landmark",
                        "--table", table, "--repeat", "20"});
    REQUIRE(d.code == l.code);
    if (d.code != 0) continue;
    ++total;
    if (nlohmann::json::parse(l.out)["iterations"] <= nlohmann::json::parse(d.out)["iterations"]) ++better;
  }
  REQUIRE(total > 0);
  CHECK(2 * better > total);
}

TEST_CASE("build edge cases") {
  oracle::TempDir dir;
  const std::string env = dir / "env.json";
  REQUIRE(invoke({"--seed", "1", "gen-env", "--lambda", "0", "--out", env}).code == 0);
  REQUIRE(invoke({"--seed", "1", "build", "--env", env, "--n", "2", "--out", dir / "two.prmg"}).code == 0);
  const auto two = load_graph(dir / "two.prmg");
  CHECK(two.vertex_count() == 2);
  CHECK((two.edge_count() == 0 || two.edge_count() == 2));

  const auto dense = invoke({"--seed", "1", "build", "--env", env, "--density", "1000", "--out", dir / "d.prmg"});
  REQUIRE(dense.code == 0);
  CHECK(load_graph(dir / "d.prmg").vertex_count() == 1000);

  CHECK(invoke({"--seed", "1", "build", "--env", env, "--n", "10", "--objectives", "energy", "--out", dir / "x.prmg"})
            .code == cli::kFailure);
}

TEST_CASE("landmarks with k = n give an exact heuristic") {
  oracle::TempDir dir;
  const std::string env = dir / "env.json", graph = dir / "g.prmg";
  REQUIRE(invoke({"--seed", "2", "gen-env", "--lambda", "20", "--out", env}).code == 0);
  REQUIRE(invoke({"--seed", "2", "build", "--env", env, "--n", "300", "--out", graph}).code == 0);
  REQUIRE(invoke({"--seed", "2", "landmarks", "--graph", graph, "--k", "300", "--out", dir / "t.lmrk"}).code == 0);
  const auto g = load_graph(graph);
  const auto t = load_table(dir / "t.lmrk", &g);
  for (VertexId goal : {0u, 150u, 299u}) {
    const LandmarkHeuristic h(t, g, goal);
    const auto exact = oracle::bellman_ford_to(g, "length", goal);
    for (VertexId v = 0; v < g.vertex_count(); v += 7)
      if (exact[v] != kInfinity) CHECK(h.evaluate(v, goal) == doctest::Approx(exact[v]).epsilon(1e-12));
  }
}

TEST_CASE("validate detects corruption and mismatches") {
  oracle::TempDir dir;
  const std::string env = dir / "env.json", graph = dir / "g.prmg", table = dir / "t.lmrk";
  REQUIRE(invoke({"--seed", "4", "gen-env", "--lambda", "30", "--out", env}).code == 0);
  REQUIRE(invoke({"--seed", "4", "build", "--env", env, "--n", "1500", "--out", graph}).code == 0);
  REQUIRE(invoke({"--seed", "5", "build", "--env", env, "--n", "1500", "--out", dir / "other.prmg"}).code == 0);
  REQUIRE(invoke({"--seed", "4", "landmarks", "--graph", graph, "--k", "8", "--out", table}).code == 0);

  const auto g = load_graph(graph);
  auto t = load_table(table, &g);
  // Inflate one distance so that |d(l, v) - d(l, goal)| overestimates for every goal.
  t.set_dist_to(0, 700, t.dist_to(0, 700) + 100.0);
  save_table(t, dir / "bad.lmrk");
  const auto bad = invoke({"validate", "--graph", graph, "--table", dir / "bad.lmrk", "--goals", "20"});
  CHECK(bad.code == cli::kValidationFailure);
  CHECK(bad.out.find("[FAIL] admissibility") != std::string::npos);

  const auto mismatch = invoke({"validate", "--graph", dir / "other.prmg", "--table", table});
  CHECK(mismatch.code == cli::kValidationFailure);
  CHECK(mismatch.out.find("[FAIL] fingerprint") != std::string::npos);

  std::string bytes = slurp(graph);
  bytes[0] = 'X';
  std::ofstream(dir / "corrupt.prmg", std::ios::binary) << bytes;
  CHECK(invoke({"validate", "--graph", dir / "corrupt.prmg"}).code == cli::kFormatError);
}

TEST_CASE("bench") {
  oracle::TempDir dir;
  REQUIRE(invoke({"--seed", "1", "bench", "--scenario", "bugtrap", "--out", dir / "bt.csv", "--reps", "2"}).code == 0);
  const auto bugtrap = slurp(dir / "bt.csv");
  CHECK(std::count(bugtrap.begin(), bugtrap.end(), '\n') == 1 + 2 * 3);

  const std::vector<std::string> fraction{"--seed", "1",      "bench", "--scenario", "fraction", "--sizes",
                                          "2000",   "--ks",   "5,20",  "--reps",     "2",        "--out"};
  auto a = fraction, b = fraction;
  a.push_back(dir / "fa.csv");
  b.push_back(dir / "fb.csv");
  REQUIRE(invoke(a).code == 0);
  REQUIRE(invoke(b).code == 0);
  CHECK(slurp(dir / "fa.csv") == slurp(dir / "fb.csv"));

  REQUIRE(invoke({"--seed", "1", "bench", "--scenario", "clutter", "--out", dir / "c.csv", "--sizes", "1000", "--ks",
               "5", "--envs", "1", "--queries", "3", "--p-clear", "0.2,1"})
              .code == 0);
  const auto csv = slurp(dir / "c.csv");
  CHECK(csv.find("clutter_sweep,0.2,") != std::string::npos);
  CHECK(csv.find("clutter_sweep,1,") != std::string::npos);

  CHECK(invoke({"bench", "--scenario", "maze", "--out", dir / "m.csv"}).code != 0);
}
