#include "lmprm/landmarks.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "lmprm/binary_io.hpp"
#include "lmprm/error.hpp"
#include "lmprm/parallel.hpp"

namespace lmprm {

namespace {

constexpr char kTableMagic[] = "LMRK";
constexpr std::uint32_t kTableVersion = 1;

struct Entry {
  double dist;
  VertexId v;
};

struct LaterFirst {
  bool operator()(const Entry& a, const Entry& b) const {
    if (a.dist != b.dist) return a.dist > b.dist;
    return a.v > b.v;
  }
};

}  // namespace

std::vector<double> sssp(const RoadmapGraph& graph, const std::string& objective_id, VertexId source,
                         Direction direction) {
  const std::size_t n = graph.vertex_count();
  if (source >= n) throw InvalidArgument("sssp: source out of range");
  const auto weights = graph.edge_weights(objective_id);
  const auto offsets = graph.offsets();
  const auto neighbors = graph.neighbors();
  const auto reverse = graph.reverse_edges();
  const bool incoming = direction == Direction::kIncoming;

  std::vector<double> dist(n, kInfinity);
  std::priority_queue<Entry, std::vector<Entry>, LaterFirst> queue;
  dist[source] = 0.0;
  queue.push({0.0, source});
  while (!queue.empty()) {
    const Entry top = queue.top();
    queue.pop();
    if (top.dist > dist[top.v]) continue;
    for (std::uint64_t e = offsets[top.v]; e < offsets[top.v + 1]; ++e) {
      const VertexId w = neighbors[e];
      // Incoming distances walk edges backwards: w -> v costs weight(reverse(e)).
      const double candidate = top.dist + weights[incoming ? reverse[e] : e];
      if (candidate < dist[w]) {
        dist[w] = candidate;
        queue.push({candidate, w});
      }
    }
  }
  return dist;
}

std::vector<VertexId> select_landmarks(std::size_t vertex_count, std::size_t k, Rng& rng) {
  if (k > vertex_count)
    throw InvalidArgument("cannot select " + std::to_string(k) + " landmarks from " + std::to_string(vertex_count) +
                          " vertices");
  std::vector<VertexId> all(vertex_count);
  std::iota(all.begin(), all.end(), VertexId{0});
  std::vector<VertexId> picked;
  picked.reserve(k);
  // Selection sampling: uniform k-subset, emitted in ascending order.
  std::sample(all.begin(), all.end(), std::back_inserter(picked), k, rng);
  return picked;
}

// ---------------------------------------------------------------------------

LandmarkTable::LandmarkTable(std::string objective_id, std::vector<VertexId> landmarks, std::size_t vertex_count,
                             bool symmetric, std::span<const double> to, std::span<const double> from,
                             std::uint64_t graph_fingerprint, std::uint64_t seed)
    : objective_id_(std::move(objective_id)),
      landmarks_(std::move(landmarks)),
      n_(vertex_count),
      symmetric_(symmetric),
      fingerprint_(graph_fingerprint),
      seed_(seed) {
  const std::size_t k = landmarks_.size();
  for (VertexId l : landmarks_)
    if (l >= n_) throw InvalidArgument("landmark id out of range");
  if (to.size() != k * n_) throw InvalidArgument("landmark table: dist_to has wrong size");
  if (symmetric_ ? !from.empty() : from.size() != k * n_)
    throw InvalidArgument("landmark table: dist_from must be empty iff symmetric");
  auto transpose = [&](std::span<const double> src, std::vector<double>& dst) {
    dst.resize(k * n_);
    for (std::size_t l = 0; l < k; ++l)
      for (std::size_t v = 0; v < n_; ++v) {
        double d = src[l * n_ + v];
        if (!(d >= 0.0)) throw InvalidArgument("landmark table: distances must be nonnegative");
        dst[v * k + l] = d;
      }
  };
  transpose(to, to_);
  if (!symmetric_) transpose(from, from_);
}

void LandmarkTable::check_graph(const RoadmapGraph& graph) const {
  if (graph.fingerprint() != fingerprint_ || graph.vertex_count() != n_)
    throw FingerprintMismatch("landmark table was built for a different graph");
}

LandmarkTable build_landmark_table(const RoadmapGraph& graph, const std::string& objective_id,
                                   std::span<const VertexId> landmarks, std::uint64_t seed, unsigned threads) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = graph.vertex_count();
  const std::size_t k = landmarks.size();
  for (VertexId l : landmarks)
    if (l >= n) throw InvalidArgument("landmark id out of range");
  const bool symmetric = graph.objective_symmetric(objective_id);

  std::vector<double> to(k * n), from(symmetric ? 0 : k * n);
  const std::size_t jobs = symmetric ? k : 2 * k;
  parallel_for(jobs, threads, [&](std::size_t j) {
    const std::size_t l = j % k;
    const bool incoming = j >= k;
    auto row = sssp(graph, objective_id, landmarks[l], incoming ? Direction::kIncoming : Direction::kOutgoing);
    std::copy(row.begin(), row.end(), (incoming ? from : to).begin() + static_cast<std::ptrdiff_t>(l * n));
  });
  LandmarkTable table(objective_id, std::vector<VertexId>(landmarks.begin(), landmarks.end()), n, symmetric, to, from,
                      graph.fingerprint(), seed);
  table.set_build_time(std::chrono::steady_clock::now() - t0);
  return table;
}

// ---------------------------------------------------------------------------

LandmarkHeuristic::LandmarkHeuristic(const LandmarkTable& table, const RoadmapGraph& graph, VertexId goal)
    : table_(&table), goal_(goal) {
  table.check_graph(graph);
  if (goal >= table.vertex_count()) throw InvalidArgument("landmark heuristic: goal out of range");
  auto to = table.to_row(goal);
  auto from = table.from_row(goal);
  goal_to_.assign(to.begin(), to.end());
  goal_from_.assign(from.begin(), from.end());
}

double LandmarkHeuristic::bound(VertexId v, std::span<const double> goal_to, std::span<const double> goal_from) const {
  const std::size_t k = goal_to.size();
  const auto x_to = table_->to_row(v);
  double best = 0.0;
  if (table_->symmetric()) {
    for (std::size_t l = 0; l < k; ++l) {
      const double a = x_to[l], b = goal_to[l];
      if (a == kInfinity || b == kInfinity) {
        if (a != b) return kInfinity;
        continue;
      }
      best = std::max(best, std::abs(a - b));
    }
    return best;
  }
  const auto x_from = table_->from_row(v);
  for (std::size_t l = 0; l < k; ++l) {
    // d(x, goal) >= d(l, goal) - d(l, x)
    const double lg = goal_to[l], lx = x_to[l];
    if (lg == kInfinity) {
      if (lx != kInfinity) return kInfinity;
    } else if (lx != kInfinity) {
      best = std::max(best, lg - lx);
    }
    // d(x, goal) >= d(x, l) - d(goal, l)
    const double xl = x_from[l], gl = goal_from[l];
    if (xl == kInfinity) {
      if (gl != kInfinity) return kInfinity;
    } else if (gl != kInfinity) {
      best = std::max(best, xl - gl);
    }
  }
  return best;
}

double LandmarkHeuristic::evaluate(VertexId v, VertexId goal) const {
  if (goal == goal_) return bound(v, goal_to_, goal_from_);
  return bound(v, table_->to_row(goal), table_->from_row(goal));
}

LandmarkHeuristic landmark_heuristic(const LandmarkTable& table, const RoadmapGraph& graph, VertexId goal) {
  return LandmarkHeuristic(table, graph, goal);
}

HeuristicQuality heuristic_quality(const LandmarkTable& table, const RoadmapGraph& graph,
                                   const std::string& objective_id, std::size_t pair_count, Rng& rng,
                                   std::size_t pairs_per_goal) {
  if (pair_count == 0) throw InvalidArgument("heuristic_quality: pair count must be positive");
  if (pairs_per_goal == 0) throw InvalidArgument("heuristic_quality: pairs_per_goal must be positive");
  if (table.objective_id() != objective_id) throw InvalidArgument("heuristic_quality: table objective mismatch");
  table.check_graph(graph);
  const std::size_t n = graph.vertex_count();
  if (n < 2) throw InvalidArgument("heuristic_quality: graph needs at least two vertices");

  std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(n - 1));
  std::uniform_int_distribution<VertexId> pick_other(0, static_cast<VertexId>(n - 2));
  HeuristicQuality q;
  std::vector<double> ratios;
  ratios.reserve(pair_count);
  std::size_t sampled = 0;
  while (sampled < pair_count) {
    const VertexId goal = pick(rng);
    const auto to_goal = sssp(graph, objective_id, goal, Direction::kIncoming);
    const LandmarkHeuristic h(table, graph, goal);
    for (std::size_t j = 0; j < pairs_per_goal && sampled < pair_count; ++j, ++sampled) {
      VertexId x = pick_other(rng);
      if (x >= goal) ++x;
      const double d = to_goal[x];
      if (d == kInfinity) {
        ++q.skipped;
        continue;
      }
      ratios.push_back(d > 0.0 ? std::min(1.0, h.evaluate(x, goal) / d) : 1.0);
    }
  }
  q.pairs = ratios.size();
  if (ratios.empty()) return q;
  q.mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / static_cast<double>(ratios.size());
  std::sort(ratios.begin(), ratios.end());
  const std::size_t m = ratios.size();
  q.median = m % 2 ? ratios[m / 2] : 0.5 * (ratios[m / 2 - 1] + ratios[m / 2]);
  q.min = ratios.front();
  return q;
}

// ---------------------------------------------------------------------------

std::vector<std::uint8_t> serialize_table(const LandmarkTable& t) {
  const std::size_t k = t.landmark_count(), n = t.vertex_count();
  io::ByteWriter w;
  w.magic(std::string_view(kTableMagic, 4));
  w.u32(kTableVersion);
  w.str(t.objective_id());
  w.u64(k);
  w.u64(n);
  w.u8(t.symmetric() ? 1 : 0);
  w.u64(t.graph_fingerprint());
  w.u64(t.seed());
  w.u64_array(std::span<const VertexId>(t.landmarks()));
  for (std::size_t l = 0; l < k; ++l)
    for (std::size_t v = 0; v < n; ++v) w.f64(t.dist_to(l, static_cast<VertexId>(v)));
  if (!t.symmetric())
    for (std::size_t l = 0; l < k; ++l)
      for (std::size_t v = 0; v < n; ++v) w.f64(t.dist_from(l, static_cast<VertexId>(v)));
  w.seal();
  return w.bytes();
}

LandmarkTable deserialize_table(std::vector<std::uint8_t> bytes, const RoadmapGraph* graph) {
  io::ByteReader r(std::move(bytes), std::string_view(kTableMagic, 4), "landmark table file");
  if (std::uint32_t version = r.u32(); version != kTableVersion)
    throw FormatError("landmark table file: unsupported version " + std::to_string(version));
  std::string objective = r.str();
  const std::uint64_t k = r.u64();
  const std::uint64_t n = r.u64();
  const std::uint8_t sym = r.u8();
  const std::uint64_t fingerprint = r.u64();
  const std::uint64_t seed = r.u64();
  if (sym > 1) throw FormatError("landmark table file: bad symmetric flag");
  const std::uint64_t matrices = sym ? 1 : 2;
  if (k > 0 && (n > r.remaining() / 8 / k || k * 8 + matrices * k * n * 8 != r.remaining()))
    throw FormatError("landmark table file: sizes do not match file length");

  std::vector<VertexId> landmarks(k);
  for (auto& l : landmarks) {
    std::uint64_t raw = r.u64();
    if (raw >= n) throw FormatError("landmark table file: landmark id out of range");
    l = static_cast<VertexId>(raw);
  }
  std::vector<double> to(k * n), from(sym ? 0 : k * n);
  r.f64_array(to);
  r.f64_array(from);
  r.expect_end();
  try {
    LandmarkTable table(std::move(objective), std::move(landmarks), n, sym == 1, to, from, fingerprint, seed);
    if (graph) table.check_graph(*graph);
    return table;
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("landmark table file: ") + e.what());
  }
}

void save_table(const LandmarkTable& table, const std::filesystem::path& path) {
  io::write_file(path, serialize_table(table));
}

LandmarkTable load_table(const std::filesystem::path& path, const RoadmapGraph* graph) {
  return deserialize_table(io::read_file(path), graph);
}

}  // namespace lmprm
