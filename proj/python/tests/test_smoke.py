import math

import numpy as np
import pytest

import lmprm


def test_environment_and_clutter():
    env = lmprm.poisson_forest(30.0, seed=4)
    assert env.dim == 2
    assert env.obstacle_count > 0
    assert 0.0 < env.mu_free <= 1.0
    assert lmprm.clear_probability(0.0, mc_pairs=1000) == 1.0
    lam = lmprm.calibrate_intensity(0.5, mc_pairs=20000, tolerance=0.01, seed=1)
    assert abs(lmprm.clear_probability(lam, mc_pairs=50000, seed=2) - 0.5) < 0.03

    trap = lmprm.bugtrap_environment()
    assert trap.point_free([0.0, 0.0])
    assert not trap.segment_clear([0.0, 0.0], [0.4, 0.0])


def test_connection_radius():
    assert lmprm.connection_radius(1e5, 2, 1.0) == pytest.approx(0.010485, rel=1e-4)


def test_build_query_and_landmarks(tmp_path):
    env = lmprm.poisson_forest(20.0, seed=7)
    graph = lmprm.build_prm(env, 2000, ["length", "work"], seed=3)
    assert graph.vertex_count == 2000
    assert graph.objectives == ["length", "work"]
    assert isinstance(graph.coords, np.ndarray) and graph.coords.shape == (2000, 2)

    table = lmprm.build_landmark_table(graph, 16, "length", seed=5)
    assert table.symmetric and len(table.landmarks) == 16

    start = graph.nearest_vertex([-0.4, -0.4])
    goal = graph.nearest_vertex([0.4, 0.4])
    d = lmprm.query(graph, start, goal, "dijkstra")
    e = lmprm.query(graph, start, goal, "euclidean")
    l = lmprm.query(graph, start, goal, "landmark", table=table)
    assert d.found == e.found == l.found
    if d.found:
        assert l.cost == pytest.approx(d.cost, rel=1e-9)
        assert e.cost == pytest.approx(d.cost, rel=1e-9)
        assert l.iterations <= d.iterations
        assert graph.path_cost("length", l.path) == pytest.approx(l.cost, rel=1e-9)

    dist = lmprm.sssp(graph, "length", table.landmarks[0])
    assert dist[table.landmarks[0]] == 0.0
    assert table.dist_to(0, 10) == dist[10]

    q = lmprm.heuristic_quality(table, graph, pairs=200, seed=1)
    assert 0.0 < q["mean"] <= 1.0

    graph.save(tmp_path / "g.prmg")
    table.save(tmp_path / "t.lmrk")
    again = lmprm.RoadmapGraph.load(tmp_path / "g.prmg")
    assert again.fingerprint == graph.fingerprint
    assert lmprm.LandmarkTable.load(tmp_path / "t.lmrk", again).landmarks == table.landmarks

    other = lmprm.build_prm(env, 2000, ["length"], seed=4)
    with pytest.raises(lmprm.FingerprintMismatch):
        lmprm.LandmarkTable.load(tmp_path / "t.lmrk", other)


def test_asymmetric_objective():
    env = lmprm.poisson_forest(0.0, seed=1)
    graph = lmprm.build_prm(env, 500, ["work"], seed=2)
    table = lmprm.build_landmark_table(graph, 8, "work", seed=3)
    assert not table.symmetric
    r = lmprm.query(graph, 0, 250, "landmark", objective="work", table=table)
    ref = lmprm.query(graph, 0, 250, "dijkstra", objective="work")
    assert r.found == ref.found
    if r.found:
        assert math.isclose(r.cost, ref.cost, rel_tol=1e-9)
    with pytest.raises(lmprm.UnknownObjective):
        lmprm.query(graph, 0, 1, "dijkstra", objective="length")


def test_cli(tmp_path):
    code, out, _ = lmprm.cli(["--seed", "1", "gen-env", "--lambda", "10", "--out", str(tmp_path / "e.json")])
    assert code == 0 and "obstacles:" in out
    assert lmprm.Environment.load(tmp_path / "e.json").seed == 1
    code, _, _ = lmprm.cli(["query", "--graph", str(tmp_path / "missing.prmg"), "--start", "0,0", "--goal", "0,0"])
    assert code != 0
