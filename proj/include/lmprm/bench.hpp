#pragma once

// Seeded experiment harness: bug trap, landmark-fraction sweep and clutter
// sweep. Every scenario emits one record per (query, method) and cross-checks
// that all admissible methods return the same optimal cost.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lmprm/env.hpp"
#include "lmprm/roadmap.hpp"

namespace lmprm::bench {

enum class Scenario { kBugtrap, kFractionSweep, kClutterSweep, kCustom };

std::string scenario_name(Scenario s);

struct ExperimentSpec {
  Scenario scenario = Scenario::kCustom;

  // Environment: an explicit one (bugtrap/custom) or Poisson forests calibrated to p_clear.
  std::optional<Environment> environment;
  std::vector<double> p_clear;
  double obstacle_radius = 0.05;
  std::size_t calibration_pairs = 100'000;
  double calibration_tolerance = 0.002;

  // Explicit graph sizes; if empty, n = round(density * mu_free) per environment.
  std::vector<std::size_t> graph_sizes;
  double density = 0.0;

  std::vector<std::size_t> landmark_counts;
  std::size_t environments = 1;
  std::size_t queries = 1;      // per (environment, graph) cell
  std::size_t repetitions = 1;  // fresh landmark set + query per repetition (fraction sweep)
  std::vector<std::string> objectives{"length"};

  // Bug trap only: fixed query endpoints, snapped to the nearest vertex.
  Point start;
  Point goal;

  std::uint64_t master_seed = 1;
  unsigned threads = 0;
};

// One CSV row.
struct ExperimentRecord {
  std::string scenario;
  double p_clear = 1.0;
  double lambda = 0.0;
  std::uint64_t env_seed = 0;
  std::size_t n = 0;
  std::uint64_t graph_seed = 0;
  std::size_t k = 0;
  std::uint64_t table_seed = 0;
  std::size_t query_idx = 0;
  std::uint64_t query_seed = 0;
  std::string method;  // dijkstra | euclidean | landmark, suffixed ":<objective>" unless "length"
  std::size_t iterations = 0;
  std::size_t pushes = 0;
  double cost = 0.0;
  double wall_time_us = 0.0;
  double preprocess_time_us = 0.0;
  std::size_t resamples = 0;
  std::string status;
};

// Bug-trap environment: a walled cavity in [-0.5, 0.5]^2 with a baffled
// opening facing -x; interior ~15% of the workspace. mu_free is exact.
Environment bugtrap_environment();
// Start at the cavity centroid; goal just behind the closed back wall.
Point bugtrap_start();
Point bugtrap_goal();

// Desk-scale presets. `paper_scale` switches to the published trial sizes.
ExperimentSpec bugtrap_spec(std::uint64_t seed, bool paper_scale = false);
ExperimentSpec fraction_sweep_spec(std::uint64_t seed, bool paper_scale = false);
ExperimentSpec clutter_sweep_spec(std::uint64_t seed, bool paper_scale = false);

// `count` log-spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

std::vector<ExperimentRecord> run_bugtrap(const ExperimentSpec& spec);
std::vector<ExperimentRecord> run_fraction_sweep(const ExperimentSpec& spec);
std::vector<ExperimentRecord> run_clutter_sweep(const ExperimentSpec& spec);
std::vector<ExperimentRecord> run(const ExperimentSpec& spec);

// Per-cell aggregate: scenario, p_clear, n, k, method. Ratios are per-query
// dijkstra/method values joined on (graph_seed, query_seed).
struct SummaryRow {
  std::string scenario;
  double p_clear = 0.0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::string method;
  std::size_t queries = 0;
  double median_iterations = 0.0;
  double median_iteration_ratio = 0.0;
  double mean_iteration_ratio = 0.0;
  double median_time_ratio = 0.0;
};

std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records);

inline constexpr std::size_t kCsvColumns = 18;
std::string csv_header();
// Timing columns are written as 0 unless include_timing, so that reruns are byte-identical.
std::string to_csv(const std::vector<ExperimentRecord>& records, bool include_timing = false);
std::string summary_csv(const std::vector<SummaryRow>& rows);
// Writes `path` and the summary next to it (<stem>.summary.csv).
void emit_report(const std::vector<ExperimentRecord>& records, const std::filesystem::path& path,
                 bool include_timing = false);

// Connected components (union-find) for sampling connected query pairs.
std::vector<VertexId> component_labels(const RoadmapGraph& graph);

}  // namespace lmprm::bench
