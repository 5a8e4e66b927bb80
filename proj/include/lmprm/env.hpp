#pragma once

// Free space with closed obstacles: membership and exact segment tests,
// Poisson-forest generation and clutter calibration.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lmprm/random.hpp"

namespace lmprm {

using Point = std::vector<double>;
using PointView = std::span<const double>;

struct Box {
  Point lo;
  Point hi;

  std::size_t dim() const { return lo.size(); }
  double volume() const;
  // Closed-box membership.
  bool contains(PointView x) const;
  bool contains(const Box& other) const;

  static Box cube(std::size_t dim, double lo, double hi);
};

// Closed ball (a disc for d = 2).
struct Circle {
  Point center;
  double radius = 0.0;
};

// Closed axis-aligned box.
struct Rect {
  Point min;
  Point max;
};

using Obstacle = std::variant<Circle, Rect>;

class Environment {
 public:
  static constexpr std::size_t kDefaultRejectionBudget = 10'000;
  static constexpr std::size_t kDefaultMuFreeSamples = 100'000;

  Environment() = default;
  // Validates the invariants (bounds nesting, positive radii, non-degenerate
  // rectangles, matching dimensions). mu_free is left at volume(free_bounds)
  // until estimate_mu_free() is called.
  Environment(Box free_bounds, Box sample_window, std::vector<Obstacle> obstacles);

  std::size_t dim() const { return free_bounds_.dim(); }
  const Box& free_bounds() const { return free_bounds_; }
  const Box& sample_window() const { return sample_window_; }
  const std::vector<Obstacle>& obstacles() const { return obstacles_; }

  double mu_free_estimate() const { return mu_free_; }
  std::size_t mu_free_samples() const { return mu_free_samples_; }
  // Seed of the generator that produced this environment (0 for hand-made ones).
  std::uint64_t seed() const { return seed_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  // Monte-Carlo estimate of the free measure from `samples` uniform points in
  // free_bounds. Stored on the environment along with the sample count.
  void estimate_mu_free(std::size_t samples, Rng& rng);
  void set_mu_free(double estimate, std::size_t samples);

  // True iff x lies in free_bounds and in no obstacle (obstacle boundaries are occupied).
  bool point_free(PointView x) const;
  // Exact test: the closed segment [p, q] stays inside free_bounds and touches no obstacle.
  bool segment_clear(PointView p, PointView q) const;
  // Rejection sampling from free_bounds; throws SamplingFailure after
  // `budget` consecutive rejections.
  Point sample_free(Rng& rng, std::size_t budget = kDefaultRejectionBudget) const;
  // Same as sample_free, writing into `out` (size dim()).
  void sample_free_into(std::span<double> out, Rng& rng, std::size_t budget = kDefaultRejectionBudget) const;

 private:
  void check_dim(PointView x) const;
  void build_obstacle_grid();
  // Calls fn(obstacle) for every obstacle whose bounding box may overlap the
  // axis-aligned box [lo, hi] (clipped to free_bounds). fn returns false to stop.
  template <class Fn>
  bool for_each_candidate(PointView lo, PointView hi, Fn&& fn) const;

  Box free_bounds_;
  Box sample_window_;
  std::vector<Obstacle> obstacles_;
  double mu_free_ = 0.0;
  std::size_t mu_free_samples_ = 0;
  std::uint64_t seed_ = 0;

  // Uniform bucket grid over free_bounds; obstacles are binned by bounding box.
  std::size_t cells_per_axis_ = 1;
  std::vector<std::uint32_t> cell_offsets_;
  std::vector<std::uint32_t> cell_items_;
};

// Distance from c to the closed segment [p, q].
double point_segment_distance(PointView c, PointView p, PointView q);

// JSON environment file. Field order is fixed so that files are reproducible.
std::string environment_to_json(const Environment& env);
Environment environment_from_json(const std::string& text);
void save_environment(const Environment& env, const std::filesystem::path& path);
Environment load_environment(const std::filesystem::path& path);

// Poisson forest: N ~ Poisson(intensity * volume(window)) circles of radius
// `obstacle_radius` with centers uniform on `window`; free bounds [-0.5, 0.5]^d.
// mu_free is estimated with `mu_free_samples` points drawn from `rng` afterwards.
Environment poisson_forest(double intensity, double obstacle_radius, const Box& window, Rng& rng,
                           std::size_t mu_free_samples = Environment::kDefaultMuFreeSamples);

// Volume swept by a ball of radius r moved along a segment of length len:
// vol(B_r) + vol_{d-1}(B_r) * len. For d = 2 this is pi r^2 + 2 r len.
double swept_volume(std::size_t dim, double radius, double length);

// P(clear | z1, z2) with the obstacle count marginalised analytically.
// With N ~ Poisson(lambda mu(S)) and per-obstacle miss probability
// q = 1 - swept/mu(S), E[q^N] = exp(-lambda mu(S) (1 - q)) = exp(-lambda * swept),
// which no longer depends on the window.
double clear_probability_given_length(std::size_t dim, double intensity, double obstacle_radius, double length);

// Monte-Carlo estimate of P(clear): averages the analytic conditional above over
// `mc_pairs` i.i.d. endpoint pairs uniform on [-0.5, 0.5]^dim.
double clear_probability(double intensity, double obstacle_radius, std::size_t mc_pairs, Rng& rng,
                         std::size_t dim = 2);

struct ClutterSpec {
  double target_clear = 0.5;
  double obstacle_radius = 0.05;
  std::size_t mc_pairs = 100'000;
  double tolerance = 0.005;
  std::size_t dim = 2;
  double max_intensity = 1e4;
};

// Bisection on the intensity. All evaluations share one set of segment
// lengths so the estimate is exactly monotone in the intensity.
double calibrate_intensity(const ClutterSpec& spec, Rng& rng);

}  // namespace lmprm
