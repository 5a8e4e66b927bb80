#pragma once

// Landmark (ALT) heuristic: exact shortest-path tables from a few landmark
// vertices, combined through the triangle inequality into an admissible
// lower bound on the remaining cost.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lmprm/random.hpp"
#include "lmprm/roadmap.hpp"
#include "lmprm/search.hpp"

namespace lmprm {

enum class Direction { kOutgoing, kIncoming };

// Exact costs from source (outgoing) or to source (incoming) for every vertex;
// +inf where unreachable.
std::vector<double> sssp(const RoadmapGraph& graph, const std::string& objective_id, VertexId source,
                         Direction direction);

// k distinct vertex ids drawn uniformly without replacement, ascending. 0 <= k <= n.
std::vector<VertexId> select_landmarks(std::size_t vertex_count, std::size_t k, Rng& rng);

class LandmarkTable {
 public:
  LandmarkTable() = default;
  // `to` and `from` are landmark-major (k x n). `from` must be empty when symmetric.
  LandmarkTable(std::string objective_id, std::vector<VertexId> landmarks, std::size_t vertex_count, bool symmetric,
                std::span<const double> to, std::span<const double> from, std::uint64_t graph_fingerprint,
                std::uint64_t seed);

  const std::string& objective_id() const { return objective_id_; }
  const std::vector<VertexId>& landmarks() const { return landmarks_; }
  std::size_t landmark_count() const { return landmarks_.size(); }
  std::size_t vertex_count() const { return n_; }
  bool symmetric() const { return symmetric_; }
  std::uint64_t graph_fingerprint() const { return fingerprint_; }
  std::uint64_t seed() const { return seed_; }
  std::chrono::nanoseconds build_time() const { return build_time_; }
  void set_build_time(std::chrono::nanoseconds t) { build_time_ = t; }

  // d(landmark l -> v)
  double dist_to(std::size_t l, VertexId v) const { return to_[static_cast<std::size_t>(v) * landmarks_.size() + l]; }
  // d(v -> landmark l); same as dist_to for symmetric objectives.
  double dist_from(std::size_t l, VertexId v) const {
    return (symmetric_ ? to_ : from_)[static_cast<std::size_t>(v) * landmarks_.size() + l];
  }
  // All k landmark distances of one vertex, contiguous.
  std::span<const double> to_row(VertexId v) const {
    return {to_.data() + static_cast<std::size_t>(v) * landmarks_.size(), landmarks_.size()};
  }
  std::span<const double> from_row(VertexId v) const {
    const auto& m = symmetric_ ? to_ : from_;
    return {m.data() + static_cast<std::size_t>(v) * landmarks_.size(), landmarks_.size()};
  }

  // Overwrites one entry; used to build corrupted fixtures for the validators.
  void set_dist_to(std::size_t l, VertexId v, double value) {
    to_[static_cast<std::size_t>(v) * landmarks_.size() + l] = value;
  }

  // Throws FingerprintMismatch unless this table was built on `graph`.
  void check_graph(const RoadmapGraph& graph) const;

 private:
  std::string objective_id_;
  std::vector<VertexId> landmarks_;
  std::size_t n_ = 0;
  bool symmetric_ = true;
  // Stored vertex-major (n x k) so one heuristic evaluation reads contiguous memory.
  std::vector<double> to_;
  std::vector<double> from_;
  std::uint64_t fingerprint_ = 0;
  std::uint64_t seed_ = 0;
  std::chrono::nanoseconds build_time_{0};
};

// One SSSP per landmark (two when the objective is asymmetric), parallel over landmarks.
LandmarkTable build_landmark_table(const RoadmapGraph& graph, const std::string& objective_id,
                                   std::span<const VertexId> landmarks, std::uint64_t seed = 0, unsigned threads = 0);

// Max over landmarks of the triangle-inequality lower bound on d(x, goal).
// Goal-dependent lookups are cached at construction; evaluation is O(k).
// For a landmark l:
//   symmetric:   |d(l, x) - d(l, goal)|
//   asymmetric:  max(d(l, goal) - d(l, x), d(x, l) - d(goal, l), 0)
// A difference with both operands infinite contributes 0; with exactly one
// infinite it contributes +inf (x and goal lie in different components).
class LandmarkHeuristic final : public Heuristic {
 public:
  LandmarkHeuristic(const LandmarkTable& table, const RoadmapGraph& graph, VertexId goal);
  double evaluate(VertexId v, VertexId goal) const override;
  VertexId goal() const { return goal_; }

 private:
  double bound(VertexId v, std::span<const double> goal_to, std::span<const double> goal_from) const;

  const LandmarkTable* table_;
  VertexId goal_;
  std::vector<double> goal_to_;    // d(l, goal)
  std::vector<double> goal_from_;  // d(goal, l)
};

LandmarkHeuristic landmark_heuristic(const LandmarkTable& table, const RoadmapGraph& graph, VertexId goal);

struct HeuristicQuality {
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  std::size_t pairs = 0;    // connected pairs measured
  std::size_t skipped = 0;  // sampled pairs that were disconnected
};

// Samples vertex pairs (x, goal), x != goal, and reports statistics of
// h(x, goal) / d(x, goal) over the connected ones. Goals are drawn first and
// each goal is paired with up to `pairs_per_goal` sources so one reverse
// SSSP serves several pairs.
HeuristicQuality heuristic_quality(const LandmarkTable& table, const RoadmapGraph& graph,
                                   const std::string& objective_id, std::size_t pair_count, Rng& rng,
                                   std::size_t pairs_per_goal = 16);

std::vector<std::uint8_t> serialize_table(const LandmarkTable& table);
// `graph`, when given, must match the table's fingerprint.
LandmarkTable deserialize_table(std::vector<std::uint8_t> bytes, const RoadmapGraph* graph = nullptr);
void save_table(const LandmarkTable& table, const std::filesystem::path& path);
LandmarkTable load_table(const std::filesystem::path& path, const RoadmapGraph* graph = nullptr);

}  // namespace lmprm
