#pragma once

// PRM* roadmap construction, CSR graph storage, edge-cost objectives and the
// binary graph file.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lmprm/env.hpp"
#include "lmprm/kdtree.hpp"
#include "lmprm/random.hpp"

namespace lmprm {

// Additive polyline cost: the cost of a path is the sum of edge_cost over its
// segments. edge_cost must be nonnegative and vanish on zero-length segments.
struct CostObjective {
  std::string id;
  std::function<double(PointView, PointView)> edge_cost;
  bool symmetric = true;
};

// Euclidean segment length.
CostObjective length_objective();

// Length plus a penalty on ascent along the last coordinate:
// |x - y| + climb_penalty * max(0, y_last - x_last). Asymmetric.
CostObjective work_objective(double climb_penalty = 5.0);

// "length" or "work"; throws UnknownObjective otherwise.
CostObjective objective_by_id(const std::string& id);

class RoadmapGraph {
 public:
  struct Weights {
    std::string objective_id;
    std::vector<double> values;  // aligned with neighbors()
  };

  RoadmapGraph() = default;
  // Validates CSR well-formedness, symmetry, no self-loops or duplicates, and
  // nonnegative weights aligned with the adjacency.
  RoadmapGraph(std::size_t dim, std::vector<double> coords, std::vector<std::uint64_t> offsets,
               std::vector<VertexId> neighbors, std::vector<Weights> weights, double connection_radius,
               std::uint64_t build_seed);

  std::size_t dim() const { return dim_; }
  std::size_t vertex_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  // Directed edge count (each undirected edge is stored twice).
  std::size_t edge_count() const { return neighbors_.size(); }
  double connection_radius() const { return connection_radius_; }
  std::uint64_t build_seed() const { return build_seed_; }

  std::span<const double> coords() const { return coords_; }
  PointView vertex(VertexId v) const { return {coords_.data() + static_cast<std::size_t>(v) * dim_, dim_}; }
  std::span<const std::uint64_t> offsets() const { return offsets_; }
  std::span<const VertexId> neighbors() const { return neighbors_; }
  std::span<const VertexId> neighbors(VertexId v) const {
    return {neighbors_.data() + offsets_[v], static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
  }
  // Index of the directed edge v->u for the edge u->v at position e.
  std::span<const std::uint64_t> reverse_edges() const { return reverse_; }

  const std::vector<Weights>& weights() const { return weights_; }
  bool has_objective(const std::string& id) const;
  // Throws UnknownObjective if absent.
  std::span<const double> edge_weights(const std::string& objective_id) const;
  // True when w(u->v) == w(v->u) for every edge under this objective.
  bool objective_symmetric(const std::string& objective_id) const;

  // CRC-64 of the serialized graph; binds landmark tables to this build.
  std::uint64_t fingerprint() const { return fingerprint_; }

  const KdTree& index() const { return index_; }
  std::vector<VertexId> radius_neighbors(PointView x, double radius) const;
  VertexId nearest_vertex(PointView x) const;

  RoadmapGraph(const RoadmapGraph& other);
  RoadmapGraph& operator=(const RoadmapGraph& other);
  RoadmapGraph(RoadmapGraph&&) noexcept;
  RoadmapGraph& operator=(RoadmapGraph&&) noexcept;

 private:
  void finalize();

  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::vector<std::uint64_t> offsets_;
  std::vector<VertexId> neighbors_;
  std::vector<std::uint64_t> reverse_;
  std::vector<Weights> weights_;
  double connection_radius_ = 0.0;
  std::uint64_t build_seed_ = 0;
  std::uint64_t fingerprint_ = 0;
  KdTree index_;
};

// r = ((2 + 2/d) * (mu_free / vol(B_1)) * (ln n / n))^(1/d). n is real-valued
// so the formula can be probed off the integers.
double connection_radius(double n, std::size_t dim, double mu_free);

struct BuildOptions {
  unsigned threads = 0;  // 0 = default_threads()
  // Overrides the PRM* radius when set.
  std::optional<double> radius;
};

// Algorithm: sample n free points (exact duplicates are redrawn), connect every
// unordered pair closer than the connection radius whose segment is clear, and
// store a weight array per objective. The result depends only on (env, n, seed).
RoadmapGraph build_prm(const Environment& env, std::size_t n, std::span<const CostObjective> objectives,
                       std::uint64_t seed, const BuildOptions& options = {});

// Same connection step over caller-provided vertices (row-major, env.dim() columns).
RoadmapGraph build_roadmap(const Environment& env, std::vector<double> coords, double radius,
                           std::span<const CostObjective> objectives, std::uint64_t seed, unsigned threads = 0);

std::vector<std::uint8_t> serialize_graph(const RoadmapGraph& graph);
RoadmapGraph deserialize_graph(std::vector<std::uint8_t> bytes);
void save_graph(const RoadmapGraph& graph, const std::filesystem::path& path);
RoadmapGraph load_graph(const std::filesystem::path& path);

}  // namespace lmprm
