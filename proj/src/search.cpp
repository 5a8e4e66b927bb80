#include "lmprm/search.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "lmprm/error.hpp"

namespace lmprm {

double EuclideanHeuristic::evaluate(VertexId v, VertexId goal) const {
  PointView a = graph_->vertex(v), b = graph_->vertex(goal);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double t = a[i] - b[i];
    s += t * t;
  }
  return std::sqrt(s);
}

EuclideanHeuristic euclidean_heuristic(const RoadmapGraph& graph) { return EuclideanHeuristic(graph); }

void SearchWorkspace::resize(std::size_t n) {
  label_.assign(n, kInfinity);
  parent_.assign(n, kNoVertex);
  stamp_.assign(n, 0);
  epoch_ = 0;
}

void SearchWorkspace::reset() {
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
}

std::vector<VertexId> path_to_root(std::span<const VertexId> parents, VertexId goal) {
  if (goal >= parents.size()) throw InvalidArgument("path_to_root: goal out of range");
  std::vector<VertexId> path;
  for (VertexId v = goal; v != kNoVertex; v = parents[v]) {
    if (path.size() >= parents.size()) throw Error("path_to_root: cycle in parent chain");
    if (v >= parents.size()) throw Error("path_to_root: parent id out of range");
    path.push_back(v);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

namespace {

struct QueueEntry {
  double key;
  double label;  // label at push time; stale once the vertex's label drops below it
  VertexId v;
};

struct LaterFirst {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    if (a.key != b.key) return a.key > b.key;
    return a.v > b.v;
  }
};

void check_vertex(const RoadmapGraph& g, VertexId v, const char* what) {
  if (v >= g.vertex_count())
    throw InvalidArgument(std::string(what) + " vertex " + std::to_string(v) + " out of range (graph has " +
                          std::to_string(g.vertex_count()) + " vertices)");
}

}  // namespace

SearchResult astar(const RoadmapGraph& graph, const std::string& objective_id, VertexId start, VertexId goal,
                   const Heuristic& h, SearchWorkspace* workspace, SearchTrace* trace) {
  const auto t0 = std::chrono::steady_clock::now();
  check_vertex(graph, start, "start");
  check_vertex(graph, goal, "goal");
  const auto weights = graph.edge_weights(objective_id);
  const auto offsets = graph.offsets();
  const auto neighbors = graph.neighbors();

  SearchWorkspace local;
  SearchWorkspace& ws = workspace ? *workspace : local;
  if (ws.size() != graph.vertex_count()) ws.resize(graph.vertex_count());
  ws.reset();

  SearchResult result;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, LaterFirst> queue;
  ws.set(start, 0.0, kNoVertex);
  if (double hs = h.evaluate(start, goal); hs != kInfinity) {
    queue.push({hs, 0.0, start});
    ++result.pushes;
  }

  while (!queue.empty()) {
    const QueueEntry top = queue.top();
    queue.pop();
    const VertexId v = top.v;
    const double label_v = ws.label(v);
    if (top.label > label_v) continue;
    ++result.iterations;
    if (trace) {
      trace->expanded.push_back(v);
      trace->keys.push_back(top.key);
    }
    if (v == goal) {
      result.status = SearchStatus::kFound;
      result.cost = label_v;
      for (VertexId u = goal; u != kNoVertex; u = ws.parent(u)) {
        if (result.path.size() > graph.vertex_count()) throw Error("astar: cycle in parent chain");
        result.path.push_back(u);
      }
      std::reverse(result.path.begin(), result.path.end());
      break;
    }
    for (std::uint64_t e = offsets[v]; e < offsets[v + 1]; ++e) {
      const VertexId w = neighbors[e];
      const double candidate = label_v + weights[e];
      if (candidate < ws.label(w)) {
        ws.set(w, candidate, v);
        const double hw = h.evaluate(w, goal);
        if (hw == kInfinity) continue;
        queue.push({candidate + hw, candidate, w});
        ++result.pushes;
      }
    }
  }
  result.wall_time = std::chrono::steady_clock::now() - t0;
  return result;
}

SearchResult dijkstra(const RoadmapGraph& graph, const std::string& objective_id, VertexId start, VertexId goal,
                      SearchWorkspace* workspace, SearchTrace* trace) {
  static const ZeroHeuristic zero;
  return astar(graph, objective_id, start, goal, zero, workspace, trace);
}

double path_cost(const RoadmapGraph& graph, const std::string& objective_id, std::span<const VertexId> path) {
  const auto weights = graph.edge_weights(objective_id);
  double cost = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    auto adj = graph.neighbors(path[i - 1]);
    auto it = std::lower_bound(adj.begin(), adj.end(), path[i]);
    if (it == adj.end() || *it != path[i]) throw InvalidArgument("path_cost: consecutive vertices are not adjacent");
    cost += weights[graph.offsets()[path[i - 1]] + static_cast<std::uint64_t>(it - adj.begin())];
  }
  return cost;
}

}  // namespace lmprm
