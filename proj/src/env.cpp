#include "lmprm/env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "lmprm/error.hpp"

namespace lmprm {

namespace {

double unit_ball_volume(std::size_t dim) {
  double d = static_cast<double>(dim);
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

double squared_norm_diff(PointView a, PointView b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

bool rect_contains(const Rect& r, PointView x) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < r.min[i] || x[i] > r.max[i]) return false;
  return true;
}

// Slab test of the closed segment against the closed box.
bool segment_hits_rect(const Rect& r, PointView p, PointView q) {
  double t0 = 0.0, t1 = 1.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double d = q[i] - p[i];
    if (d == 0.0) {
      if (p[i] < r.min[i] || p[i] > r.max[i]) return false;
      continue;
    }
    double a = (r.min[i] - p[i]) / d;
    double b = (r.max[i] - p[i]) / d;
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return false;
  }
  return true;
}

bool segment_misses(const Obstacle& o, PointView p, PointView q) {
  if (const auto* c = std::get_if<Circle>(&o)) return point_segment_distance(c->center, p, q) > c->radius;
  return !segment_hits_rect(std::get<Rect>(o), p, q);
}

void validate_box(const Box& b, const char* name) {
  if (b.lo.empty() || b.lo.size() != b.hi.size()) throw InvalidArgument(std::string(name) + ": malformed box");
  for (std::size_t i = 0; i < b.lo.size(); ++i)
    if (!(b.lo[i] < b.hi[i])) throw InvalidArgument(std::string(name) + ": box must have positive extent");
}

}  // namespace

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

bool Box::contains(PointView x) const {
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  return true;
}

bool Box::contains(const Box& other) const { return contains(other.lo) && contains(other.hi); }

Box Box::cube(std::size_t dim, double lo, double hi) { return Box{Point(dim, lo), Point(dim, hi)}; }

Environment::Environment(Box free_bounds, Box sample_window, std::vector<Obstacle> obstacles)
    : free_bounds_(std::move(free_bounds)), sample_window_(std::move(sample_window)), obstacles_(std::move(obstacles)) {
  validate_box(free_bounds_, "free_bounds");
  validate_box(sample_window_, "sample_window");
  if (free_bounds_.dim() != sample_window_.dim()) throw InvalidArgument("free_bounds/sample_window dimension mismatch");
  if (!sample_window_.contains(free_bounds_)) throw InvalidArgument("free_bounds must lie inside sample_window");
  const std::size_t d = dim();
  for (const Obstacle& o : obstacles_) {
    if (const auto* c = std::get_if<Circle>(&o)) {
      if (c->center.size() != d) throw InvalidArgument("circle dimension mismatch");
      if (!(c->radius > 0.0)) throw InvalidArgument("circle radius must be positive");
    } else {
      const auto& r = std::get<Rect>(o);
      if (r.min.size() != d || r.max.size() != d) throw InvalidArgument("rectangle dimension mismatch");
      for (std::size_t i = 0; i < d; ++i)
        if (!(r.min[i] < r.max[i])) throw InvalidArgument("rectangle must be non-degenerate");
    }
  }
  mu_free_ = free_bounds_.volume();
  build_obstacle_grid();
}

namespace {

std::pair<Point, Point> obstacle_bounds(const Obstacle& o) {
  if (const auto* c = std::get_if<Circle>(&o)) {
    Point lo = c->center, hi = c->center;
    for (std::size_t i = 0; i < lo.size(); ++i) {
      lo[i] -= c->radius;
      hi[i] += c->radius;
    }
    return {std::move(lo), std::move(hi)};
  }
  const auto& r = std::get<Rect>(o);
  return {r.min, r.max};
}

}  // namespace

// Cell range along axis i covering [a, b]; false when it misses the bounds.
static bool axis_cells(const Box& b, std::size_t m, std::size_t i, double a, double c, std::size_t& first,
                       std::size_t& last) {
  if (c < b.lo[i] || a > b.hi[i]) return false;
  const double scale = static_cast<double>(m) / (b.hi[i] - b.lo[i]);
  auto cell = [&](double x) {
    double t = std::floor((x - b.lo[i]) * scale);
    return static_cast<std::size_t>(std::clamp(t, 0.0, static_cast<double>(m - 1)));
  };
  first = cell(a);
  last = cell(c);
  return true;
}

void Environment::build_obstacle_grid() {
  const std::size_t d = dim();
  const double count = static_cast<double>(std::max<std::size_t>(obstacles_.size(), 1));
  std::size_t m = static_cast<std::size_t>(std::ceil(std::pow(count, 1.0 / static_cast<double>(d))));
  const std::size_t max_per_axis =
      static_cast<std::size_t>(std::floor(std::pow(1e5, 1.0 / static_cast<double>(d))));
  cells_per_axis_ = std::clamp<std::size_t>(m, 1, std::max<std::size_t>(1, std::min<std::size_t>(64, max_per_axis)));
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= cells_per_axis_;

  std::vector<std::vector<std::uint32_t>> buckets(total);
  std::vector<std::size_t> first(d), last(d), idx(d);
  for (std::size_t k = 0; k < obstacles_.size(); ++k) {
    auto [lo, hi] = obstacle_bounds(obstacles_[k]);
    bool hit = true;
    for (std::size_t i = 0; i < d && hit; ++i)
      hit = axis_cells(free_bounds_, cells_per_axis_, i, lo[i], hi[i], first[i], last[i]);
    if (!hit) continue;
    idx = first;
    while (true) {
      std::size_t flat = 0;
      for (std::size_t i = d; i-- > 0;) flat = flat * cells_per_axis_ + idx[i];
      buckets[flat].push_back(static_cast<std::uint32_t>(k));
      std::size_t i = 0;
      for (; i < d; ++i) {
        if (idx[i] < last[i]) {
          ++idx[i];
          break;
        }
        idx[i] = first[i];
      }
      if (i == d) break;
    }
  }
  cell_offsets_.assign(total + 1, 0);
  cell_items_.clear();
  for (std::size_t c = 0; c < total; ++c) {
    cell_items_.insert(cell_items_.end(), buckets[c].begin(), buckets[c].end());
    cell_offsets_[c + 1] = static_cast<std::uint32_t>(cell_items_.size());
  }
}

template <class Fn>
bool Environment::for_each_candidate(PointView lo, PointView hi, Fn&& fn) const {
  const std::size_t d = dim();
  std::size_t first[8], last[8], idx[8];
  if (d > 8) {
    for (const Obstacle& o : obstacles_)
      if (!fn(o)) return false;
    return true;
  }
  for (std::size_t i = 0; i < d; ++i)
    if (!axis_cells(free_bounds_, cells_per_axis_, i, lo[i], hi[i], first[i], last[i])) return true;
  std::copy(first, first + d, idx);
  while (true) {
    std::size_t flat = 0;
    for (std::size_t i = d; i-- > 0;) flat = flat * cells_per_axis_ + idx[i];
    for (std::uint32_t c = cell_offsets_[flat]; c < cell_offsets_[flat + 1]; ++c)
      if (!fn(obstacles_[cell_items_[c]])) return false;
    std::size_t i = 0;
    for (; i < d; ++i) {
      if (idx[i] < last[i]) {
        ++idx[i];
        break;
      }
      idx[i] = first[i];
    }
    if (i == d) return true;
  }
}

void Environment::check_dim(PointView x) const {
  if (x.size() != dim())
    throw InvalidArgument("point has dimension " + std::to_string(x.size()) + ", environment has " +
                          std::to_string(dim()));
}

void Environment::estimate_mu_free(std::size_t samples, Rng& rng) {
  if (samples == 0) throw InvalidArgument("mu_free estimate needs at least one sample");
  Point x(dim());
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < dim(); ++i)
      x[i] = std::uniform_real_distribution<double>(free_bounds_.lo[i], free_bounds_.hi[i])(rng);
    if (point_free(x)) ++hits;
  }
  set_mu_free(free_bounds_.volume() * static_cast<double>(hits) / static_cast<double>(samples), samples);
}

void Environment::set_mu_free(double estimate, std::size_t samples) {
  if (!(estimate >= 0.0) || estimate > free_bounds_.volume() * (1.0 + 1e-12))
    throw InvalidArgument("mu_free estimate outside [0, volume(free_bounds)]");
  mu_free_ = estimate;
  mu_free_samples_ = samples;
}

bool Environment::point_free(PointView x) const {
  check_dim(x);
  if (!free_bounds_.contains(x)) return false;
  return for_each_candidate(x, x, [&](const Obstacle& o) {
    if (const auto* c = std::get_if<Circle>(&o)) return squared_norm_diff(x, c->center) > c->radius * c->radius;
    return !rect_contains(std::get<Rect>(o), x);
  });
}

bool Environment::segment_clear(PointView p, PointView q) const {
  check_dim(p);
  check_dim(q);
  // The box is convex, so endpoint membership covers the whole segment.
  if (!free_bounds_.contains(p) || !free_bounds_.contains(q)) return false;
  double lo[8], hi[8];
  if (dim() > 8) return for_each_candidate(p, q, [&](const Obstacle& o) { return segment_misses(o, p, q); });
  for (std::size_t i = 0; i < dim(); ++i) {
    lo[i] = std::min(p[i], q[i]);
    hi[i] = std::max(p[i], q[i]);
  }
  return for_each_candidate(PointView(lo, dim()), PointView(hi, dim()),
                            [&](const Obstacle& o) { return segment_misses(o, p, q); });
}

Point Environment::sample_free(Rng& rng, std::size_t budget) const {
  Point x(dim());
  sample_free_into(x, rng, budget);
  return x;
}

void Environment::sample_free_into(std::span<double> out, Rng& rng, std::size_t budget) const {
  check_dim(out);
  for (std::size_t attempt = 0; attempt < budget; ++attempt) {
    for (std::size_t i = 0; i < dim(); ++i)
      out[i] = std::uniform_real_distribution<double>(free_bounds_.lo[i], free_bounds_.hi[i])(rng);
    if (point_free(out)) return;
  }
  throw SamplingFailure("no free sample after " + std::to_string(budget) + " consecutive rejections");
}

double point_segment_distance(PointView c, PointView p, PointView q) {
  double dd = 0.0, dot = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double d = q[i] - p[i];
    dd += d * d;
    dot += (c[i] - p[i]) * d;
  }
  double t = dd > 0.0 ? std::clamp(dot / dd, 0.0, 1.0) : 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double e = c[i] - (p[i] + t * (q[i] - p[i]));
    s += e * e;
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using ojson = nlohmann::ordered_json;

ojson box_json(const Box& b) { return ojson{{"lo", b.lo}, {"hi", b.hi}}; }

Box box_from(const ojson& j) { return Box{j.at("lo").get<Point>(), j.at("hi").get<Point>()}; }

}  // namespace

std::string environment_to_json(const Environment& env) {
  ojson j;
  j["dim"] = env.dim();
  j["free_bounds"] = box_json(env.free_bounds());
  j["sample_window"] = box_json(env.sample_window());
  ojson obs = ojson::array();
  for (const Obstacle& o : env.obstacles()) {
    if (const auto* c = std::get_if<Circle>(&o)) {
      obs.push_back(ojson{{"kind", "circle"}, {"center", c->center}, {"radius", c->radius}});
    } else {
      const auto& r = std::get<Rect>(o);
      obs.push_back(ojson{{"kind", "rect"}, {"min", r.min}, {"max", r.max}});
    }
  }
  j["obstacles"] = std::move(obs);
  j["mu_free_estimate"] = env.mu_free_estimate();
  j["mu_free_samples"] = env.mu_free_samples();
  j["seed"] = env.seed();
  return j.dump(2) + "\n";
}

Environment environment_from_json(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("environment JSON: ") + e.what());
  }
  try {
    std::vector<Obstacle> obstacles;
    for (const auto& o : j.at("obstacles")) {
      const auto kind = o.at("kind").get<std::string>();
      if (kind == "circle")
        obstacles.emplace_back(Circle{o.at("center").get<Point>(), o.at("radius").get<double>()});
      else if (kind == "rect")
        obstacles.emplace_back(Rect{o.at("min").get<Point>(), o.at("max").get<Point>()});
      else
        throw FormatError("environment JSON: unknown obstacle kind '" + kind + "'");
    }
    Environment env(box_from(j.at("free_bounds")), box_from(j.at("sample_window")), std::move(obstacles));
    if (j.at("dim").get<std::size_t>() != env.dim()) throw FormatError("environment JSON: dim does not match bounds");
    env.set_mu_free(j.at("mu_free_estimate").get<double>(), j.at("mu_free_samples").get<std::size_t>());
    env.set_seed(j.value("seed", std::uint64_t{0}));
    return env;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("environment JSON: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("environment JSON: ") + e.what());
  }
}

void save_environment(const Environment& env, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << environment_to_json(env);
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

Environment load_environment(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return environment_from_json(ss.str());
}

// ---------------------------------------------------------------------------
// Poisson forest and clutter

Environment poisson_forest(double intensity, double obstacle_radius, const Box& window, Rng& rng,
                           std::size_t mu_free_samples) {
  if (!(intensity >= 0.0) || !std::isfinite(intensity)) throw InvalidArgument("intensity must be finite and >= 0");
  if (!(obstacle_radius > 0.0)) throw InvalidArgument("obstacle radius must be positive");
  validate_box(window, "sample_window");
  const std::size_t d = window.dim();

  const double mean = intensity * window.volume();
  std::size_t count = 0;
  if (mean > 0.0) count = static_cast<std::size_t>(std::poisson_distribution<long long>(mean)(rng));

  std::vector<Obstacle> obstacles;
  obstacles.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Point c(d);
    for (std::size_t i = 0; i < d; ++i) c[i] = std::uniform_real_distribution<double>(window.lo[i], window.hi[i])(rng);
    obstacles.emplace_back(Circle{std::move(c), obstacle_radius});
  }
  Environment env(Box::cube(d, -0.5, 0.5), window, std::move(obstacles));
  env.estimate_mu_free(mu_free_samples, rng);
  return env;
}

double swept_volume(std::size_t dim, double radius, double length) {
  if (dim == 0) throw InvalidArgument("dimension must be positive");
  double ball = unit_ball_volume(dim) * std::pow(radius, static_cast<double>(dim));
  double slab = unit_ball_volume(dim - 1) * std::pow(radius, static_cast<double>(dim - 1));
  return ball + slab * length;
}

double clear_probability_given_length(std::size_t dim, double intensity, double obstacle_radius, double length) {
  return std::exp(-intensity * swept_volume(dim, obstacle_radius, length));
}

namespace {

void check_clutter_args(double intensity, double obstacle_radius, std::size_t mc_pairs, std::size_t dim) {
  if (!(intensity >= 0.0)) throw InvalidArgument("intensity must be >= 0");
  if (!(obstacle_radius > 0.0)) throw InvalidArgument("obstacle radius must be positive");
  if (mc_pairs == 0) throw InvalidArgument("mc_pairs must be positive");
  if (dim == 0) throw InvalidArgument("dimension must be positive");
}

std::vector<double> sample_pair_lengths(std::size_t pairs, std::size_t dim, Rng& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<double> lengths(pairs);
  for (double& len : lengths) {
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      double a = u(rng), b = u(rng);
      s += (a - b) * (a - b);
    }
    len = std::sqrt(s);
  }
  return lengths;
}

double mean_clear(std::span<const double> lengths, std::size_t dim, double intensity, double radius) {
  if (intensity == 0.0) return 1.0;
  double sum = 0.0;
  for (double len : lengths) sum += clear_probability_given_length(dim, intensity, radius, len);
  return sum / static_cast<double>(lengths.size());
}

}  // namespace

double clear_probability(double intensity, double obstacle_radius, std::size_t mc_pairs, Rng& rng, std::size_t dim) {
  check_clutter_args(intensity, obstacle_radius, mc_pairs, dim);
  auto lengths = sample_pair_lengths(mc_pairs, dim, rng);
  return mean_clear(lengths, dim, intensity, obstacle_radius);
}

double calibrate_intensity(const ClutterSpec& spec, Rng& rng) {
  if (!(spec.target_clear > 0.0 && spec.target_clear <= 1.0)) throw InvalidArgument("target_clear must be in (0, 1]");
  if (!(spec.tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
  check_clutter_args(0.0, spec.obstacle_radius, spec.mc_pairs, spec.dim);
  if (spec.target_clear >= 1.0) return 0.0;

  const auto lengths = sample_pair_lengths(spec.mc_pairs, spec.dim, rng);
  auto f = [&](double lambda) { return mean_clear(lengths, spec.dim, lambda, spec.obstacle_radius); };

  double lo = 0.0, hi = 1.0;
  while (f(hi) > spec.target_clear) {
    lo = hi;
    hi *= 2.0;
    if (hi > spec.max_intensity) {
      if (f(spec.max_intensity) > spec.target_clear)
        throw CalibrationFailure("target clear probability " + std::to_string(spec.target_clear) +
                                 " not reachable with intensity <= " + std::to_string(spec.max_intensity));
      hi = spec.max_intensity;
      break;
    }
  }
  // f is continuous and strictly decreasing on the shared sample.
  for (int iter = 0; iter < 200 && hi - lo > 1e-12 * hi; ++iter) {
    double mid = 0.5 * (lo + hi);
    (f(mid) > spec.target_clear ? lo : hi) = mid;
  }
  double lambda = 0.5 * (lo + hi);
  if (std::abs(f(lambda) - spec.target_clear) > spec.tolerance)
    throw CalibrationFailure("bisection did not reach the requested tolerance");
  return lambda;
}

}  // namespace lmprm
