#include "lmprm/roadmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <set>

#include "lmprm/binary_io.hpp"
#include "lmprm/error.hpp"
#include "lmprm/parallel.hpp"

namespace lmprm {

namespace {

double euclidean(PointView a, PointView b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double t = a[i] - b[i];
    s += t * t;
  }
  return std::sqrt(s);
}

constexpr char kGraphMagic[] = "PRMG";
constexpr std::uint32_t kGraphVersion = 1;

}  // namespace

CostObjective length_objective() { return {"length", [](PointView a, PointView b) { return euclidean(a, b); }, true}; }

CostObjective work_objective(double climb_penalty) {
  if (!(climb_penalty >= 0.0)) throw InvalidArgument("climb penalty must be nonnegative");
  return {"work",
          [climb_penalty](PointView a, PointView b) {
            return euclidean(a, b) + climb_penalty * std::max(0.0, b.back() - a.back());
          },
          false};
}

CostObjective objective_by_id(const std::string& id) {
  if (id == "length") return length_objective();
  if (id == "work") return work_objective();
  throw UnknownObjective("unknown objective '" + id + "' (expected length or work)");
}

// ---------------------------------------------------------------------------

RoadmapGraph::RoadmapGraph(std::size_t dim, std::vector<double> coords, std::vector<std::uint64_t> offsets,
                           std::vector<VertexId> neighbors, std::vector<Weights> weights, double connection_radius,
                           std::uint64_t build_seed)
    : dim_(dim),
      coords_(std::move(coords)),
      offsets_(std::move(offsets)),
      neighbors_(std::move(neighbors)),
      weights_(std::move(weights)),
      connection_radius_(connection_radius),
      build_seed_(build_seed) {
  if (dim_ == 0) throw InvalidArgument("graph dimension must be positive");
  if (coords_.size() % dim_ != 0) throw InvalidArgument("coordinate array does not match dimension");
  const std::size_t n = coords_.size() / dim_;
  if (offsets_.size() != n + 1 || offsets_.front() != 0 || offsets_.back() != neighbors_.size())
    throw InvalidArgument("CSR offsets malformed");
  for (std::size_t v = 0; v < n; ++v) {
    if (offsets_[v] > offsets_[v + 1]) throw InvalidArgument("CSR offsets not monotone");
    auto adj = this->neighbors(static_cast<VertexId>(v));
    for (std::size_t i = 0; i < adj.size(); ++i) {
      if (adj[i] >= n) throw InvalidArgument("CSR neighbor id out of range");
      if (adj[i] == v) throw InvalidArgument("self-loop in adjacency");
      if (i > 0 && adj[i] <= adj[i - 1]) throw InvalidArgument("adjacency lists must be strictly ascending");
    }
  }
  for (std::size_t a = 0; a < weights_.size(); ++a) {
    if (weights_[a].values.size() != neighbors_.size()) throw InvalidArgument("weight array not aligned with edges");
    for (double w : weights_[a].values)
      if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("edge weights must be finite and nonnegative");
    for (std::size_t b = 0; b < a; ++b)
      if (weights_[a].objective_id == weights_[b].objective_id) throw InvalidArgument("duplicate objective id");
  }
  finalize();
}

void RoadmapGraph::finalize() {
  const std::size_t n = vertex_count();
  reverse_.assign(neighbors_.size(), 0);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::uint64_t e = offsets_[u]; e < offsets_[u + 1]; ++e) {
      VertexId v = neighbors_[e];
      auto adj = neighbors(v);
      auto it = std::lower_bound(adj.begin(), adj.end(), static_cast<VertexId>(u));
      if (it == adj.end() || *it != u) throw InvalidArgument("adjacency is not symmetric");
      reverse_[e] = offsets_[v] + static_cast<std::uint64_t>(it - adj.begin());
    }
  }
  index_ = KdTree(coords_, dim_);
  auto bytes = serialize_graph(*this);
  std::memcpy(&fingerprint_, bytes.data() + bytes.size() - sizeof fingerprint_, sizeof fingerprint_);
}

RoadmapGraph::RoadmapGraph(const RoadmapGraph& other)
    : dim_(other.dim_),
      coords_(other.coords_),
      offsets_(other.offsets_),
      neighbors_(other.neighbors_),
      reverse_(other.reverse_),
      weights_(other.weights_),
      connection_radius_(other.connection_radius_),
      build_seed_(other.build_seed_),
      fingerprint_(other.fingerprint_),
      index_(coords_, dim_ == 0 ? 1 : dim_) {}

RoadmapGraph& RoadmapGraph::operator=(const RoadmapGraph& other) {
  if (this != &other) *this = RoadmapGraph(other);
  return *this;
}

// std::vector moves keep their buffers, so the index's view stays valid.
RoadmapGraph::RoadmapGraph(RoadmapGraph&&) noexcept = default;
RoadmapGraph& RoadmapGraph::operator=(RoadmapGraph&&) noexcept = default;

bool RoadmapGraph::has_objective(const std::string& id) const {
  return std::any_of(weights_.begin(), weights_.end(), [&](const Weights& w) { return w.objective_id == id; });
}

std::span<const double> RoadmapGraph::edge_weights(const std::string& objective_id) const {
  for (const Weights& w : weights_)
    if (w.objective_id == objective_id) return w.values;
  throw UnknownObjective("graph has no weights for objective '" + objective_id + "'");
}

bool RoadmapGraph::objective_symmetric(const std::string& objective_id) const {
  auto w = edge_weights(objective_id);
  for (std::size_t e = 0; e < w.size(); ++e)
    if (w[e] != w[reverse_[e]]) return false;
  return true;
}

std::vector<VertexId> RoadmapGraph::radius_neighbors(PointView x, double radius) const {
  if (x.size() != dim_) throw InvalidArgument("query point dimension mismatch");
  return index_.radius_query(x, radius);
}

VertexId RoadmapGraph::nearest_vertex(PointView x) const {
  if (x.size() != dim_) throw InvalidArgument("query point dimension mismatch");
  if (vertex_count() == 0) throw InvalidArgument("nearest vertex query on an empty graph");
  return index_.nearest(x);
}

// ---------------------------------------------------------------------------

double connection_radius(double n, std::size_t dim, double mu_free) {
  if (!(n >= 2.0)) throw InvalidArgument("connection radius needs n >= 2");
  if (dim == 0) throw InvalidArgument("dimension must be positive");
  if (!(mu_free > 0.0)) throw InvalidArgument("free-space measure must be positive");
  const double d = static_cast<double>(dim);
  const double unit_ball = std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
  return std::pow((2.0 + 2.0 / d) * (mu_free / unit_ball) * (std::log(n) / n), 1.0 / d);
}

RoadmapGraph build_roadmap(const Environment& env, std::vector<double> coords, double radius,
                           std::span<const CostObjective> objectives, std::uint64_t seed, unsigned threads) {
  const std::size_t d = env.dim();
  if (coords.size() % d != 0) throw InvalidArgument("vertex array does not match environment dimension");
  if (!(radius > 0.0)) throw InvalidArgument("connection radius must be positive");
  const std::size_t n = coords.size() / d;
  for (std::size_t a = 0; a < objectives.size(); ++a)
    for (std::size_t b = 0; b < a; ++b)
      if (objectives[a].id == objectives[b].id) throw InvalidArgument("objective listed twice: " + objectives[a].id);

  KdTree tree(coords, d);
  auto point = [&](std::size_t v) { return PointView(coords.data() + v * d, d); };

  // Each unordered pair is tested once, from its smaller endpoint.
  std::vector<std::vector<VertexId>> upper(n);
  constexpr std::size_t kChunk = 256;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(chunks, threads, [&](std::size_t c) {
    std::vector<VertexId> candidates;
    for (std::size_t u = c * kChunk; u < std::min(n, (c + 1) * kChunk); ++u) {
      tree.radius_query(point(u), radius, static_cast<VertexId>(u), candidates);
      for (VertexId v : candidates)
        if (v > u && env.segment_clear(point(u), point(v))) upper[u].push_back(v);
    }
  });

  std::vector<std::uint64_t> offsets(n + 1, 0);
  for (std::size_t u = 0; u < n; ++u) {
    offsets[u + 1] += upper[u].size();
    for (VertexId v : upper[u]) offsets[v + 1] += 1;
  }
  for (std::size_t u = 0; u < n; ++u) offsets[u + 1] += offsets[u];
  std::vector<VertexId> neighbors(offsets[n]);
  std::vector<std::uint64_t> fill(offsets.begin(), offsets.end() - 1);
  // Visiting u in ascending order keeps every adjacency list sorted.
  for (std::size_t u = 0; u < n; ++u)
    for (VertexId v : upper[u]) {
      neighbors[fill[u]++] = v;
      neighbors[fill[v]++] = static_cast<VertexId>(u);
    }

  std::vector<RoadmapGraph::Weights> weights;
  for (const CostObjective& obj : objectives) {
    std::vector<double> w(neighbors.size());
    for (std::size_t u = 0; u < n; ++u)
      for (std::uint64_t e = offsets[u]; e < offsets[u + 1]; ++e) w[e] = obj.edge_cost(point(u), point(neighbors[e]));
    weights.push_back({obj.id, std::move(w)});
  }
  return RoadmapGraph(d, std::move(coords), std::move(offsets), std::move(neighbors), std::move(weights), radius,
                      seed);
}

namespace {

struct CoordLess {
  std::size_t dim;
  bool operator()(const double* a, const double* b) const {
    return std::lexicographical_compare(a, a + dim, b, b + dim);
  }
};

}  // namespace

RoadmapGraph build_prm(const Environment& env, std::size_t n, std::span<const CostObjective> objectives,
                       std::uint64_t seed, const BuildOptions& options) {
  if (n < 2) throw InvalidArgument("PRM needs at least 2 vertices");
  const std::size_t d = env.dim();
  const double radius = options.radius ? *options.radius : connection_radius(static_cast<double>(n), d,
                                                                            env.mu_free_estimate());
  Rng rng(seed);
  std::vector<double> coords(n * d);
  std::set<const double*, CoordLess> seen(CoordLess{d});
  for (std::size_t v = 0; v < n; ++v) {
    std::span<double> x(coords.data() + v * d, d);
    do {
      env.sample_free_into(x, rng);
    } while (!seen.insert(x.data()).second);
  }
  seen.clear();
  return build_roadmap(env, std::move(coords), radius, objectives, seed, options.threads);
}

// ---------------------------------------------------------------------------
// Binary file: see README for the layout.

std::vector<std::uint8_t> serialize_graph(const RoadmapGraph& g) {
  io::ByteWriter w;
  w.magic(std::string_view(kGraphMagic, 4));
  w.u32(kGraphVersion);
  w.u32(static_cast<std::uint32_t>(g.dim()));
  w.u64(g.vertex_count());
  w.u64(g.edge_count());
  w.f64(g.connection_radius());
  w.u64(g.build_seed());
  w.u32(static_cast<std::uint32_t>(g.weights().size()));
  for (const auto& wt : g.weights()) w.str(wt.objective_id);
  w.f64_array(g.coords());
  w.u64_array(g.offsets());
  w.u64_array(g.neighbors());
  for (const auto& wt : g.weights()) w.f64_array(wt.values);
  w.seal();
  return w.bytes();
}

RoadmapGraph deserialize_graph(std::vector<std::uint8_t> bytes) {
  io::ByteReader r(std::move(bytes), std::string_view(kGraphMagic, 4), "graph file");
  if (std::uint32_t version = r.u32(); version != kGraphVersion)
    throw FormatError("graph file: unsupported version " + std::to_string(version));
  const std::uint32_t dim = r.u32();
  const std::uint64_t n = r.u64();
  const std::uint64_t m = r.u64();
  const double radius = r.f64();
  const std::uint64_t seed = r.u64();
  const std::uint32_t objective_count = r.u32();
  if (dim == 0) throw FormatError("graph file: zero dimension");
  // Reject sizes that cannot fit in the remaining payload before allocating.
  const std::uint64_t per_obj = m * 8;
  if (n > r.remaining() / 8 / dim || m > r.remaining() / 8 || objective_count > r.remaining())
    throw FormatError("graph file: header sizes exceed file length");

  std::vector<RoadmapGraph::Weights> weights(objective_count);
  for (auto& wt : weights) wt.objective_id = r.str();
  std::vector<double> coords(n * dim);
  r.f64_array(coords);
  std::vector<std::uint64_t> offsets(n + 1);
  for (auto& o : offsets) o = r.u64();
  std::vector<VertexId> neighbors(m);
  for (auto& v : neighbors) {
    std::uint64_t raw = r.u64();
    if (raw >= n) throw FormatError("graph file: neighbor id out of range");
    v = static_cast<VertexId>(raw);
  }
  if (objective_count > 0 && per_obj * objective_count > r.remaining())
    throw FormatError("graph file: weight arrays truncated");
  for (auto& wt : weights) {
    wt.values.resize(m);
    r.f64_array(wt.values);
  }
  r.expect_end();
  try {
    return RoadmapGraph(dim, std::move(coords), std::move(offsets), std::move(neighbors), std::move(weights), radius,
                        seed);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("graph file: ") + e.what());
  }
}

void save_graph(const RoadmapGraph& graph, const std::filesystem::path& path) {
  io::write_file(path, serialize_graph(graph));
}

RoadmapGraph load_graph(const std::filesystem::path& path) { return deserialize_graph(io::read_file(path)); }

}  // namespace lmprm
