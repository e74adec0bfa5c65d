#pragma once

#include "pivotbench/dataset.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace pivotbench {

/// Orchard's index: for every point, all other points sorted by increasing
/// distance (ties to the lower id). Memory is n*(n-1)*12 bytes, hence the cap.
class OrchardIndex {
 public:
  static constexpr Eigen::Index kDefaultMaxPoints = 50'000;

  OrchardIndex(Eigen::Index n, std::vector<std::uint32_t> ids, std::vector<double> dists);

  Eigen::Index size() const { return n_; }
  std::span<const std::uint32_t> row_ids(Eigen::Index x) const {
    return {ids_.data() + row_offset(x), static_cast<std::size_t>(n_ - 1)};
  }
  std::span<const double> row_dists(Eigen::Index x) const {
    return {dists_.data() + row_offset(x), static_cast<std::size_t>(n_ - 1)};
  }

 private:
  std::size_t row_offset(Eigen::Index x) const { return static_cast<std::size_t>(x) * static_cast<std::size_t>(n_ - 1); }

  Eigen::Index n_;
  std::vector<std::uint32_t> ids_;
  std::vector<double> dists_;
};

/// Evaluates each unordered pair once (n(n-1)/2 charges). Refuses n above
/// max_points unless allow_large is set.
OrchardIndex build_orchard(const Dataset& ds, DistanceCounter& counter,
                           Eigen::Index max_points = OrchardIndex::kDefaultMaxPoints, bool allow_large = false);

struct OrchardResult {
  Eigen::Index nn_id = -1;
  double nn_dist = 0.0;
  std::uint64_t cost = 0;  ///< fresh evaluations of rho(q, .)
};

/// Exact 1-NN: walk the current candidate y's row, move to any z closer to q,
/// stop once rho(z,y) > 2 rho(y,q). rho(q, .) is memoized, so cost <= n.
OrchardResult orchard_nn(const OrchardIndex& idx, const Dataset& ds, const Point& q, Eigen::Index start_id,
                         DistanceCounter& counter);

/// Start from a seeded random id.
OrchardResult orchard_nn(const OrchardIndex& idx, const Dataset& ds, const Point& q, Seed seed,
                         std::uint64_t query_index, DistanceCounter& counter);

}  // namespace pivotbench
