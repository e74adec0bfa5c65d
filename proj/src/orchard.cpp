#include "pivotbench/orchard.hpp"

#include "pivotbench/parallel.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace pivotbench {

OrchardIndex::OrchardIndex(Eigen::Index n, std::vector<std::uint32_t> ids, std::vector<double> dists)
    : n_(n), ids_(std::move(ids)), dists_(std::move(dists)) {
  const auto expected = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1);
  if (n < 2 || ids_.size() != expected || dists_.size() != expected)
    throw std::invalid_argument("orchard index: inconsistent row storage");
}

OrchardIndex build_orchard(const Dataset& ds, DistanceCounter& counter, Eigen::Index max_points,
                           bool allow_large) {
  const Eigen::Index n = ds.size();
  if (n < 2) throw std::invalid_argument("build_orchard: need at least two points");
  if (n > max_points && !allow_large)
    throw std::length_error("build_orchard: n=" + std::to_string(n) + " exceeds the cap of " +
                            std::to_string(max_points) + " points (O(n^2) memory)");
  if (n > static_cast<Eigen::Index>(std::numeric_limits<std::uint32_t>::max()))
    throw std::length_error("build_orchard: n exceeds 32-bit id range");

  const auto un = static_cast<std::size_t>(n);
  std::vector<double> full(un * un, 0.0);
  const std::size_t workers = worker_count();
  std::vector<DistanceCounter> local(workers);
  parallel_for(
      un,
      [&](std::size_t begin, std::size_t end, std::size_t w) {
        MeteredMetric rho(ds.metric(), local[w]);
        for (std::size_t x = begin; x < end; ++x)
          for (std::size_t y = x + 1; y < un; ++y)
            full[x * un + y] = rho(ds.point(static_cast<Eigen::Index>(x)), ds.point(static_cast<Eigen::Index>(y)));
      },
      workers);
  for (const auto& c : local) counter += c;

  std::vector<std::uint32_t> ids(un * (un - 1));
  std::vector<double> dists(un * (un - 1));
  parallel_for(un, [&](std::size_t begin, std::size_t end, std::size_t) {
    std::vector<std::uint32_t> order(un - 1);
    for (std::size_t x = begin; x < end; ++x) {
      auto at = [&](std::size_t y) { return x < y ? full[x * un + y] : full[y * un + x]; };
      std::size_t slot = 0;
      for (std::size_t y = 0; y < un; ++y)
        if (y != x) order[slot++] = static_cast<std::uint32_t>(y);
      std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return at(a) < at(b); });
      for (std::size_t s = 0; s < un - 1; ++s) {
        ids[x * (un - 1) + s] = order[s];
        dists[x * (un - 1) + s] = at(order[s]);
      }
    }
  });
  return OrchardIndex(n, std::move(ids), std::move(dists));
}

OrchardResult orchard_nn(const OrchardIndex& idx, const Dataset& ds, const Point& q, Eigen::Index start_id,
                         DistanceCounter& counter) {
  ds.check_center(q);
  if (idx.size() != ds.size()) throw std::invalid_argument("orchard index does not match dataset");
  if (start_id < 0 || start_id >= ds.size())
    throw std::out_of_range("orchard_nn: start id " + std::to_string(start_id) + " out of range");

  DistanceCounter local;
  MeteredMetric rho(ds.metric(), local);
  std::vector<bool> seen(static_cast<std::size_t>(ds.size()), false);

  Eigen::Index y = start_id;
  double dy = rho(q, ds.point(y));
  seen[static_cast<std::size_t>(y)] = true;

  for (bool moved = true; moved;) {
    moved = false;
    const auto ids = idx.row_ids(y);
    const auto dists = idx.row_dists(y);
    for (std::size_t s = 0; s < ids.size(); ++s) {
      // Strict: a tie at 2 rho(y,q) is not pruned.
      if (dists[s] > 2.0 * dy) break;
      const Eigen::Index z = ids[s];
      if (seen[static_cast<std::size_t>(z)]) continue;
      seen[static_cast<std::size_t>(z)] = true;
      const double dz = rho(q, ds.point(z));
      if (dz < dy || (dz == dy && z < y)) {
        y = z;
        dy = dz;
        moved = true;
        break;
      }
    }
  }
  counter += local;
  return {y, dy, local.count};
}

OrchardResult orchard_nn(const OrchardIndex& idx, const Dataset& ds, const Point& q, Seed seed,
                         std::uint64_t query_index, DistanceCounter& counter) {
  Rng rng(seed, StreamDomain::Centers, query_index);
  const auto start = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(ds.size())));
  return orchard_nn(idx, ds, q, start, counter);
}

}  // namespace pivotbench
