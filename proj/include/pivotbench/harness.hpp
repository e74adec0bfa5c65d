#pragma once

#include "pivotbench/diagnostics.hpp"
#include "pivotbench/selection.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pivotbench {

/// Where a benchmark's dataset comes from: a generator or an ASCII file.
struct DatasetSpec {
  std::optional<Generator> generator;
  Eigen::Index dim = 8;
  Eigen::Index count = 10'000;
  Seed seed{};
  std::filesystem::path file;
  std::optional<MetricKind> metric;  ///< overrides the dataset's default metric

  Dataset materialize() const;
};

enum class SelectionMode { Random, Incremental };

/// One selection strategy in a sweep: random pivots, or incremental
/// selection over a random or smart pair sample.
struct SelectionStrategy {
  SelectionMode mode = SelectionMode::Random;
  PairMode pair_mode = RandomPairs{};

  std::string name() const;  ///< "random", "incremental", "incremental-smart<j>"
};

struct ExperimentConfig {
  DatasetSpec dataset;
  std::vector<SelectionStrategy> strategies{SelectionStrategy{}};
  std::size_t pair_count = 5000;  ///< A
  std::size_t candidates = 40;    ///< N
  std::vector<Eigen::Index> k_sweep{4, 8, 16, 32};
  std::size_t query_count = 1000;
  std::size_t probe_count = 200;
  double target_fraction = 0.001;
  Seed seed{};

  void validate() const;
};

struct ExperimentRow {
  Eigen::Index d = 0;
  Eigen::Index n = 0;
  Eigen::Index k = 0;
  std::string selection_mode;
  double radius = 0.0;
  double avg_cost = 0.0;
  double avg_result_size = 0.0;
  double median_discard_fraction = 0.0;
  std::uint64_t build_cost = 0;  ///< pivot selection + table construction
  std::uint64_t seed = 0;
  // Audit fields, not part of the CSV schema.
  std::size_t query_count = 0;
  std::uint64_t query_cost_total = 0;    ///< sum of per-query report costs
  std::uint64_t query_counter_delta = 0;  ///< counter delta over the query phase
};

struct CalibratedRadius {
  double radius = 0.0;
  bool degenerate = false;  ///< every pooled distance was equal
};

/// Smallest pooled probe-to-dataset distance v with empirical CDF(v) >= target.
/// Probe centers are generator draws, or dataset points with self excluded
/// (all of them when probe_count >= n).
CalibratedRadius calibrate_radius(const Dataset& ds, double target_fraction, std::size_t probe_count, Seed seed,
                                  DistanceCounter& counter);

/// Query center number `index` for a sweep: a fresh generator draw, or a
/// dataset point excluded from its own query when the dataset has no generator.
RangeQuery sweep_query(const Dataset& ds, double radius, Seed seed, StreamDomain domain, std::uint64_t index);

using RowSink = std::function<void(const ExperimentRow&)>;

/// One row per (k, strategy). Radius is calibrated once and shared by every
/// row. Each finished row is passed to `sink` before the next is started.
std::vector<ExperimentRow> run_sweep(const ExperimentConfig& cfg, const RowSink& sink = {});
/// Same, over an already materialized dataset (cfg.dataset is ignored).
std::vector<ExperimentRow> run_sweep(const ExperimentConfig& cfg, const Dataset& ds, const RowSink& sink = {});

inline constexpr const char* kSweepCsvHeader =
    "d,n,k,selection_mode,radius,avg_cost,avg_result_size,median_discard_fraction,build_cost,seed";
void write_csv_row(const ExperimentRow& row, std::ostream& out);

}  // namespace pivotbench
