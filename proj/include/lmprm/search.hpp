#pragma once

// A* over a roadmap with pluggable heuristics. Dijkstra is the h = 0 case.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lmprm/roadmap.hpp"

namespace lmprm {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr VertexId kNoVertex = static_cast<VertexId>(-1);

// Lower bound on the remaining cost from v to goal. +inf is allowed and means
// the goal is unreachable from v. Implementations must be read-only during a search.
class Heuristic {
 public:
  virtual ~Heuristic() = default;
  virtual double evaluate(VertexId v, VertexId goal) const = 0;
};

class ZeroHeuristic final : public Heuristic {
 public:
  double evaluate(VertexId, VertexId) const override { return 0.0; }
};

// Straight-line distance between vertex coordinates. Admissible for the
// "length" objective only.
class EuclideanHeuristic final : public Heuristic {
 public:
  explicit EuclideanHeuristic(const RoadmapGraph& graph) : graph_(&graph) {}
  double evaluate(VertexId v, VertexId goal) const override;

 private:
  const RoadmapGraph* graph_;
};

EuclideanHeuristic euclidean_heuristic(const RoadmapGraph& graph);

enum class SearchStatus { kFound, kNoSolution };

struct SearchResult {
  SearchStatus status = SearchStatus::kNoSolution;
  std::vector<VertexId> path;  // start first
  double cost = kInfinity;
  std::size_t iterations = 0;  // non-stale pops
  std::size_t pushes = 0;
  std::chrono::nanoseconds wall_time{0};

  bool found() const { return status == SearchStatus::kFound; }
};

// Optional instrumentation: every expanded vertex and its queue key, in order.
struct SearchTrace {
  std::vector<VertexId> expanded;
  std::vector<double> keys;
};

// Per-query mutable state sized to the graph. Labels are invalidated in O(1)
// between queries through an epoch stamp. Not shareable between threads.
class SearchWorkspace {
 public:
  SearchWorkspace() = default;
  explicit SearchWorkspace(std::size_t n) { resize(n); }

  void resize(std::size_t n);
  std::size_t size() const { return label_.size(); }
  // Starts a new query; all labels read as +inf and parents as kNoVertex.
  void reset();

  double label(VertexId v) const { return stamp_[v] == epoch_ ? label_[v] : kInfinity; }
  VertexId parent(VertexId v) const { return stamp_[v] == epoch_ ? parent_[v] : kNoVertex; }
  void set(VertexId v, double label, VertexId parent) {
    stamp_[v] = epoch_;
    label_[v] = label;
    parent_[v] = parent;
  }

 private:
  std::vector<double> label_;
  std::vector<VertexId> parent_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
};

// Reconstructs the path ending at goal by following parents until kNoVertex.
// Throws Error if the chain does not terminate within parents.size() steps.
std::vector<VertexId> path_to_root(std::span<const VertexId> parents, VertexId goal);

// Pops the queue entry minimizing label + h (smaller id on ties), skipping
// entries whose label has since improved; goal test on pop. Relaxes with a
// strict improvement test and re-pushes, so inconsistent heuristics remain
// correct. `workspace` may be null (a temporary one is used).
SearchResult astar(const RoadmapGraph& graph, const std::string& objective_id, VertexId start, VertexId goal,
                   const Heuristic& h, SearchWorkspace* workspace = nullptr, SearchTrace* trace = nullptr);

SearchResult dijkstra(const RoadmapGraph& graph, const std::string& objective_id, VertexId start, VertexId goal,
                      SearchWorkspace* workspace = nullptr, SearchTrace* trace = nullptr);

// Sum of objective weights along a vertex path; throws if consecutive
// vertices are not adjacent.
double path_cost(const RoadmapGraph& graph, const std::string& objective_id, std::span<const VertexId> path);

}  // namespace lmprm
