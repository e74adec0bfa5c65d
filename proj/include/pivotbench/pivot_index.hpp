#pragma once

#include "pivotbench/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace pivotbench {

using PivotTable = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Pivot ids p_1..p_k and the n x k table of rho(x, p_i).
class PivotIndex {
 public:
  PivotIndex(std::vector<Eigen::Index> pivot_ids, PivotTable table, MetricKind metric);

  Eigen::Index pivot_count() const { return static_cast<Eigen::Index>(pivot_ids_.size()); }
  Eigen::Index size() const { return table_.rows(); }
  const std::vector<Eigen::Index>& pivot_ids() const { return pivot_ids_; }
  const PivotTable& table() const { return table_; }
  MetricKind metric() const { return metric_; }

 private:
  std::vector<Eigen::Index> pivot_ids_;
  PivotTable table_;
  MetricKind metric_;
};

/// Range query; construction rejects negative or non-finite radii.
class RangeQuery {
 public:
  RangeQuery(Point center, double radius, std::optional<Eigen::Index> exclude_id = std::nullopt);

  const Point& center() const { return center_; }
  double radius() const { return radius_; }
  /// Leave-one-out: this dataset id is neither evaluated nor returned. It is
  /// counted in the discard set, since its membership is known at no cost.
  const std::optional<Eigen::Index>& exclude_id() const { return exclude_id_; }

 private:
  Point center_;
  double radius_;
  std::optional<Eigen::Index> exclude_id_;
};

struct QueryReport {
  std::vector<Eigen::Index> result_ids;  ///< ascending
  std::vector<double> result_dists;      ///< parallel to result_ids
  std::uint64_t discarded = 0;           ///< |C|
  std::uint64_t cost = 0;                ///< k + (n - |C|)
  double discard_fraction = 0.0;         ///< |C| / n
  double radius = 0.0;                   ///< query radius; for kNN the k-th best distance
};

/// n*k evaluations. Rejects duplicate or out-of-range ids and k = 0.
PivotIndex build_index(const Dataset& ds, std::span<const Eigen::Index> pivot_ids,
                       DistanceCounter& counter);

/// Distances from q to every pivot (k evaluations).
Eigen::VectorXd pivot_distances(const PivotIndex& idx, const Dataset& ds, const Point& q,
                                DistanceCounter& counter);

/// max_i |q_dists[i] - table[x][i]|. Free: charges nothing.
template <typename Derived>
double rho_k(const PivotIndex& idx, const Eigen::MatrixBase<Derived>& q_dists, Eigen::Index x) {
  if (q_dists.size() != idx.pivot_count()) throw DimensionMismatch(q_dists.size(), idx.pivot_count());
  if (x < 0 || x >= idx.size()) throw std::out_of_range("rho_k: point id out of range");
  double best = 0.0;
  for (Eigen::Index i = 0; i < q_dists.size(); ++i)
    best = std::max(best, std::abs(q_dists(i) - idx.table()(x, i)));
  return best;
}

/// Pivot-filtered range query: x is discarded when rho_k(q,x) > r, otherwise
/// rho(q,x) is evaluated and x returned when rho(q,x) <= r.
QueryReport range_query(const PivotIndex& idx, const Dataset& ds, const RangeQuery& query,
                        DistanceCounter& counter);

/// Exact k_nn nearest neighbours (ties to the lower id) by a shrinking-radius
/// scan that skips x when rho_k(q,x) exceeds the current k_nn-th best distance.
QueryReport knn_query(const PivotIndex& idx, const Dataset& ds, const Point& center,
                      Eigen::Index k_nn, DistanceCounter& counter);

/// The fraction-of-dataset query: knn_query with k_nn = ceil(fraction * n).
QueryReport proportion_query(const PivotIndex& idx, const Dataset& ds, const Point& center,
                             double fraction, DistanceCounter& counter);

/// Baseline: evaluates rho(q,x) for every x. Cost n.
QueryReport linear_scan(const Dataset& ds, const RangeQuery& query, DistanceCounter& counter);

/// Index file: "k n", the pivot ids on one line, then n rows of k reals.
void save_index(const PivotIndex& idx, const std::filesystem::path& path);
void write_index(const PivotIndex& idx, std::ostream& out);
PivotIndex load_index(const std::filesystem::path& path, MetricKind metric);

}  // namespace pivotbench
