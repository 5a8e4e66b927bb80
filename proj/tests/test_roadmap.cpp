#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lmprm/error.hpp"
#include "lmprm/kdtree.hpp"
#include "lmprm/roadmap.hpp"
#include "oracles.hpp"

using namespace lmprm;

namespace {

Environment empty_env() {
  Environment env(Box::cube(2, -0.5, 0.5), Box::cube(2, -1.0, 1.0), {});
  env.set_mu_free(1.0, 0);
  return env;
}

std::vector<double> random_coords(std::size_t n, std::size_t dim, Rng& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<double> c(n * dim);
  for (double& x : c) x = u(rng);
  return c;
}

const std::vector<CostObjective> kBoth{length_objective(), work_objective()};

}  // namespace

TEST_CASE("connection radius") {
  const double e2 = std::exp(2.0);
  const double expected = std::sqrt(3.0 / M_PI * 2.0 / e2);
  CHECK(connection_radius(e2, 2, 1.0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(connection_radius(e2, 2, 1.0) == doctest::Approx(0.5084).epsilon(1e-4));
  CHECK(connection_radius(1e5, 2, 1.0) == doctest::Approx(0.010485).epsilon(1e-4));
  for (double n = 3; n < 1e6; n *= 1.7) {
    CHECK(connection_radius(n * 1.7, 2, 1.0) < connection_radius(n, 2, 1.0));
    CHECK(connection_radius(n, 2, 0.5) < connection_radius(n, 2, 1.0));
  }
  // d = 3: unit ball volume 4/3 pi, factor 2 + 2/3.
  CHECK(connection_radius(1000, 3, 1.0) ==
        doctest::Approx(std::cbrt((8.0 / 3.0) * (3.0 / (4.0 * M_PI)) * std::log(1000.0) / 1000.0)));
}

TEST_CASE("kd-tree radius query") {
  std::vector<double> two{0.0, 0.0, 0.5, 0.0};
  KdTree tree(two, 2);
  CHECK(tree.radius_query(Point{0.0, 0.0}, 0.5, 0).empty());
  CHECK(tree.radius_query(Point{0.0, 0.0}, 0.51, 0) == std::vector<VertexId>{1});

  Rng rng(2);
  for (std::size_t dim : {2u, 3u}) {
    const auto coords = random_coords(1000, dim, rng);
    KdTree big(coords, dim);
    for (int q = 0; q < 200; ++q) {
      const auto x = random_coords(1, dim, rng);
      const double r = std::uniform_real_distribution<double>(0.0, 0.3)(rng);
      CHECK(big.radius_query(x, r) == oracle::radius_scan(coords, dim, x, r));
    }
  }
}

TEST_CASE("kd-tree nearest") {
  Rng rng(6);
  const auto coords = random_coords(1000, 2, rng);
  KdTree tree(coords, 2);
  CHECK(tree.nearest(std::span<const double>(coords).subspan(14, 2)) == 7);
  for (int q = 0; q < 100; ++q) {
    const auto x = random_coords(1, 2, rng);
    CHECK(tree.nearest(x) == oracle::nearest_scan(coords, 2, x));
  }
  // Ten vertices; ids 3 and 9 equidistant from the query, everything else farther.
  std::vector<double> tie(20, 5.0);
  tie[6] = 1.0, tie[7] = 0.0;
  tie[18] = -1.0, tie[19] = 0.0;
  KdTree tie_tree(tie, 2);
  CHECK(tie_tree.nearest(Point{0.0, 0.0}) == 3);
}

TEST_CASE("objectives") {
  const auto len = length_objective();
  const auto work = work_objective();
  CHECK(len.edge_cost(Point{0, 0}, Point{3, 4}) == 5.0);
  CHECK(work.edge_cost(Point{0, 0}, Point{3, 4}) == 5.0 + 5.0 * 4.0);
  CHECK(work.edge_cost(Point{3, 4}, Point{0, 0}) == 5.0);
  CHECK_FALSE(work.symmetric);
  CHECK(objective_by_id("work").id == "work");
  CHECK_THROWS_AS(objective_by_id("energy"), UnknownObjective);
}

TEST_CASE("two-vertex roadmaps") {
  const auto env = empty_env();
  const auto g = build_roadmap(env, {0.0, 0.0, 0.1, 0.0}, 0.2, kBoth, 1);
  REQUIRE(g.edge_count() == 2);
  CHECK(g.edge_weights("length")[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(g.edge_weights("work")[0] == g.edge_weights("length")[0]);

  CHECK(build_roadmap(env, {0.0, 0.0, 0.3, 0.0}, 0.2, kBoth, 1).edge_count() == 0);
  const Environment walled(Box::cube(2, -0.5, 0.5), Box::cube(2, -0.5, 0.5), {Rect{{0.04, -0.5}, {0.06, 0.5}}});
  CHECK(build_roadmap(walled, {0.0, 0.0, 0.1, 0.0}, 0.2, kBoth, 1).edge_count() == 0);
}

TEST_CASE("PRM build invariants on a cluttered environment") {
  Rng rng(12);
  const auto env = poisson_forest(40.0, 0.05, Box::cube(2, -1.0, 1.0), rng, 20'000);
  const auto g = build_prm(env, 3000, kBoth, 99);
  REQUIRE(g.vertex_count() == 3000);
  CHECK(g.connection_radius() == doctest::Approx(connection_radius(3000, 2, env.mu_free_estimate())));

  const auto len = g.edge_weights("length");
  const auto work = g.edge_weights("work");
  std::size_t bad_edges = 0, bad_weights = 0, asymmetric = 0;
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    REQUIRE(env.point_free(g.vertex(u)));
    for (std::uint64_t e = g.offsets()[u]; e < g.offsets()[u + 1]; ++e) {
      const VertexId v = g.neighbors()[e];
      const double d = oracle::distance(g.vertex(u), g.vertex(v));
      if (!env.segment_clear(g.vertex(u), g.vertex(v)) || !(d < g.connection_radius())) ++bad_edges;
      if (std::abs(len[e] - d) > 1e-12) ++bad_weights;
      const double climb = std::max(0.0, g.vertex(v)[1] - g.vertex(u)[1]);
      if (std::abs(work[e] - (d + 5.0 * climb)) > 1e-12) ++bad_weights;
      const auto back = g.neighbors(v);
      if (!std::binary_search(back.begin(), back.end(), u)) ++asymmetric;
    }
  }
  CHECK(bad_edges == 0);
  CHECK(bad_weights == 0);
  CHECK(asymmetric == 0);

  // Exhaustive pair check: every clear pair inside the radius is connected.
  std::size_t missing = 0;
  for (VertexId u = 0; u < 300; ++u)
    for (VertexId v : oracle::radius_scan(g.coords(), 2, g.vertex(u), g.connection_radius())) {
      if (v == u || !env.segment_clear(g.vertex(u), g.vertex(v))) continue;
      const auto adj = g.neighbors(u);
      if (!std::binary_search(adj.begin(), adj.end(), v)) ++missing;
    }
  CHECK(missing == 0);
}

TEST_CASE("interior degree follows the radius formula") {
  const auto env = empty_env();
  const std::size_t n = 5000;
  const auto g = build_prm(env, n, std::vector<CostObjective>{length_objective()}, 4);
  const double r = g.connection_radius();
  double total = 0.0;
  std::size_t interior = 0;
  for (VertexId v = 0; v < n; ++v) {
    const auto x = g.vertex(v);
    if (std::abs(x[0]) > 0.5 - r || std::abs(x[1]) > 0.5 - r) continue;
    total += static_cast<double>(g.neighbors(v).size());
    ++interior;
  }
  const double expected = 3.0 * std::log(static_cast<double>(n));
  CHECK(std::abs(total / interior - expected) <= 0.15 * expected);
}

TEST_CASE("build is deterministic and seed sensitive") {
  const auto env = empty_env();
  const auto a = serialize_graph(build_prm(env, 800, kBoth, 5));
  const auto b = serialize_graph(build_prm(env, 800, kBoth, 5, BuildOptions{.threads = 3}));
  const auto c = serialize_graph(build_prm(env, 800, kBoth, 6));
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("graph file round trip") {
  oracle::TempDir dir;
  const auto env = empty_env();
  const auto g = build_prm(env, 1000, kBoth, 8);
  save_graph(g, dir / "g.prmg");
  const auto back = load_graph(dir / "g.prmg");
  CHECK(serialize_graph(back) == serialize_graph(g));
  CHECK(back.fingerprint() == g.fingerprint());
  CHECK(back.has_objective("length"));
  CHECK(back.has_objective("work"));
  CHECK_FALSE(back.objective_symmetric("work"));
  CHECK(std::equal(back.edge_weights("work").begin(), back.edge_weights("work").end(),
                   g.edge_weights("work").begin()));

  auto bytes = serialize_graph(g);
  auto bad_magic = bytes;
  bad_magic[0] = 'Q';
  CHECK_THROWS_AS(deserialize_graph(bad_magic), FormatError);
  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x10;
  CHECK_THROWS_AS(deserialize_graph(flipped), FormatError);
  CHECK_THROWS_AS(load_graph(dir / "missing.prmg"), Error);
  CHECK_THROWS_AS(g.edge_weights("energy"), UnknownObjective);
}

TEST_CASE("CSR validation") {
  using W = RoadmapGraph::Weights;
  std::vector<double> c{0, 0, 1, 0};
  CHECK_NOTHROW(RoadmapGraph(2, c, {0, 1, 2}, {1, 0}, {W{"length", {1, 1}}}, 2, 0));
  CHECK_THROWS_AS(RoadmapGraph(2, c, {0, 1, 1}, {1}, {W{"length", {1}}}, 2, 0), InvalidArgument);
  CHECK_THROWS_AS(RoadmapGraph(2, c, {0, 1, 2}, {0, 1}, {W{"length", {1, 1}}}, 2, 0), InvalidArgument);
  CHECK_THROWS_AS(RoadmapGraph(2, c, {0, 1, 2}, {1, 0}, {W{"length", {1, -1}}}, 2, 0), InvalidArgument);
  CHECK_THROWS_AS(RoadmapGraph(2, c, {0, 1, 2}, {1, 0}, {W{"length", {1}}}, 2, 0), InvalidArgument);
}

TEST_CASE("nearest_vertex snaps to the closest sample") {
  const auto env = empty_env();
  const auto g = build_prm(env, 500, std::vector<CostObjective>{length_objective()}, 3);
  Rng rng(1);
  for (int q = 0; q < 50; ++q) {
    const auto x = random_coords(1, 2, rng);
    CHECK(g.nearest_vertex(x) == oracle::nearest_scan(g.coords(), 2, x));
  }
}
