#pragma once

#include "pivotbench/dataset.hpp"

#include <iosfwd>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace pivotbench {

struct PairSample {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  std::size_t size() const { return pairs.size(); }
};

struct RandomPairs {};
/// Each sampled center is paired with its j-th nearest neighbour.
struct SmartKnn {
  Eigen::Index j = 20;
};
using PairMode = std::variant<RandomPairs, SmartKnn>;

struct SelectionConfig {
  Eigen::Index k = 1;           ///< pivots to select
  std::size_t pair_count = 5000;  ///< A
  std::size_t candidates = 40;    ///< N
  Seed seed{};
  PairMode pair_mode = RandomPairs{};

  void validate() const;
};

/// A pairs uniform with replacement; a pair whose ids coincide is redrawn.
PairSample random_pairs(const Dataset& ds, std::size_t pair_count, Seed seed);

/// A random centers (with replacement), each paired with its j-th nearest
/// other point (ties to the lower id) found by brute force; charges n-1 per center.
PairSample smart_pairs(const Dataset& ds, std::size_t pair_count, Eigen::Index j, Seed seed,
                       DistanceCounter& counter);

/// Greedy state over a fixed pair sample: the running value of
/// rho_{p_1..p_i}(x, y) for every pair.
class PairObjective {
 public:
  explicit PairObjective(PairSample pairs);

  const PairSample& pairs() const { return pairs_; }
  const std::vector<double>& maxima() const { return maxima_; }
  /// Sample mean of the cached maxima.
  double mean() const;

  /// Per-pair lower bounds |rho(x,c) - rho(y,c)|; 2 evaluations per pair.
  std::vector<double> candidate_bounds(const Dataset& ds, Eigen::Index c, DistanceCounter& counter) const;
  /// Mean of max(cached, bound) over the sample, without committing.
  double score(std::span<const double> bounds) const;
  void commit(std::span<const double> bounds);

 private:
  PairSample pairs_;
  std::vector<double> maxima_;
};

struct CandidateChoice {
  Eigen::Index id = -1;
  double mean = 0.0;
};

/// Scores every distinct candidate and returns the best (largest mean,
/// ties to the lowest id), committing its bounds into the objective.
CandidateChoice choose_pivot(const Dataset& ds, PairObjective& objective,
                             std::span<const Eigen::Index> candidates, DistanceCounter& counter);

/// Incremental selection over an explicit pair sample.
std::vector<Eigen::Index> select_incremental(const Dataset& ds, const PairSample& pairs, Eigen::Index k,
                                             std::size_t candidates, Seed seed, DistanceCounter& counter,
                                             std::vector<double>* objective_trace = nullptr);

/// Incremental selection; the pair sample is built according to cfg.pair_mode.
std::vector<Eigen::Index> select_incremental(const Dataset& ds, const SelectionConfig& cfg,
                                             DistanceCounter& counter,
                                             std::vector<double>* objective_trace = nullptr);

/// k distinct ids, uniformly (partial Fisher-Yates).
std::vector<Eigen::Index> select_random(const Dataset& ds, Eigen::Index k, Seed seed);

/// Pivot list as one line of space-separated ids.
void write_pivots(std::span<const Eigen::Index> ids, std::ostream& out);
std::vector<Eigen::Index> read_pivots(std::istream& in);

}  // namespace pivotbench
