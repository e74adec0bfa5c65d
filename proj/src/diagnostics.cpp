#include "pivotbench/diagnostics.hpp"

#include "pivotbench/parallel.hpp"
#include "pivotbench/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace pivotbench {

namespace {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

Moments moments(std::span<const double> v) {
  Moments m;
  m.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.variance = ss / static_cast<double>(v.size() - 1);
  }
  return m;
}

std::vector<double> sampled_distances(const Dataset& ds, std::size_t pairs, Seed seed, DistanceCounter& counter) {
  const PairSample sample = random_pairs(ds, pairs, seed);
  std::vector<double> out(sample.size());
  const std::size_t workers = worker_count();
  std::vector<DistanceCounter> local(workers);
  parallel_for(
      sample.size(),
      [&](std::size_t begin, std::size_t end, std::size_t w) {
        MeteredMetric rho(ds.metric(), local[w]);
        for (std::size_t a = begin; a < end; ++a)
          out[a] = rho(ds.point(sample.pairs[a].first), ds.point(sample.pairs[a].second));
      },
      workers);
  for (const auto& c : local) counter += c;
  return out;
}

}  // namespace

ChavezEstimate chavez_dimension(const Dataset& ds, std::size_t pairs, Seed seed, DistanceCounter& counter) {
  if (ds.size() < 2) throw std::invalid_argument("chavez_dimension: need at least two points");
  if (pairs < 2) throw std::invalid_argument("chavez_dimension: need at least two pairs");
  const auto dists = sampled_distances(ds, pairs, seed, counter);
  const Moments m = moments(dists);
  ChavezEstimate est{m.mean, m.variance, 0.0, dists.size(), false};
  if (m.variance == 0.0) {
    est.infinite = true;
    est.dtilde = std::numeric_limits<double>::infinity();
  } else {
    est.dtilde = m.mean * m.mean / (2.0 * m.variance);
  }
  return est;
}

Histogram make_histogram(std::span<const double> values, std::size_t bins) {
  if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
  if (values.empty()) throw std::invalid_argument("histogram: no values");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  Histogram h;
  h.edges.resize(bins + 1);
  h.counts.assign(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = lo + width * static_cast<double>(b);
  h.edges[bins] = hi;
  for (double v : values) {
    std::size_t b = width > 0.0 ? static_cast<std::size_t>((v - lo) / width) : 0;
    h.counts[std::min(b, bins - 1)]++;
  }
  const Moments m = moments(values);
  h.mean = m.mean;
  h.stddev = std::sqrt(m.variance);
  return h;
}

Histogram distance_histogram(const Dataset& ds, std::size_t pairs, std::size_t bins, bool normalize, Seed seed,
                             DistanceCounter& counter) {
  if (bins < 1) throw std::invalid_argument("distance_histogram: bins must be >= 1");
  if (pairs < 1) throw std::invalid_argument("distance_histogram: pairs must be >= 1");
  auto dists = sampled_distances(ds, pairs, seed, counter);
  if (normalize) {
    const double scale = std::sqrt(static_cast<double>(ds.dim()));
    for (double& v : dists) v /= scale;
  }
  return make_histogram(dists, bins);
}

double lower_median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty sample");
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

double median_nn_distance(const Dataset& ds, std::size_t queries, Seed seed, DistanceCounter& counter) {
  const Eigen::Index n = ds.size();
  if (n < 2) throw std::invalid_argument("median_nn_distance: need at least two points");
  if (queries < 1) throw std::invalid_argument("median_nn_distance: need at least one query");

  const bool fresh = ds.source().has_value();
  std::vector<Eigen::Index> self_ids;
  if (!fresh) {
    if (queries >= static_cast<std::size_t>(n)) {
      self_ids.resize(static_cast<std::size_t>(n));
      std::iota(self_ids.begin(), self_ids.end(), Eigen::Index{0});
    } else {
      self_ids = select_random(ds, static_cast<Eigen::Index>(queries), seed);
    }
  }
  const std::size_t count = fresh ? queries : self_ids.size();

  std::vector<double> nn(count);
  const std::size_t workers = worker_count();
  std::vector<DistanceCounter> local(workers);
  parallel_for(
      count,
      [&](std::size_t begin, std::size_t end, std::size_t w) {
        MeteredMetric rho(ds.metric(), local[w]);
        for (std::size_t qi = begin; qi < end; ++qi) {
          Point q;
          Eigen::Index skip = -1;
          if (fresh) {
            GeneratorSpec spec = *ds.source();
            spec.seed = seed;
            q = draw_point(spec, StreamDomain::Queries, qi);
          } else {
            skip = self_ids[qi];
            q = ds.point(skip);
          }
          double best = std::numeric_limits<double>::infinity();
          for (Eigen::Index x = 0; x < n; ++x)
            if (x != skip) best = std::min(best, rho(q, ds.point(x)));
          nn[qi] = best;
        }
      },
      workers);
  for (const auto& c : local) counter += c;
  return lower_median(std::move(nn));
}

double sphere_concentration(int d, double eps) {
  constexpr double half_pi = std::numbers::pi / 2.0;
  if (d < 2) throw std::invalid_argument("sphere_concentration: d must be >= 2");
  if (!(eps >= 0.0 && eps <= half_pi)) throw std::invalid_argument("sphere_concentration: eps must lie in [0, pi/2]");
  const double power = static_cast<double>(d - 2);
  auto density = [power, d](double x) {
    const double c = std::max(std::cos(x), 0.0);
    if (power == 0.0) return 1.0;
    if (c == 0.0) return 0.0;
    return d > 500 ? std::exp(power * std::log(c)) : std::pow(c, power);
  };
  constexpr double tol = 1e-12;
  const double half = adaptive_simpson(density, 0.0, half_pi, tol);
  double tail = half;
  if (eps > 0.0) {
    // Tighten the tolerance until it is small relative to the tail itself.
    double scale = half;
    tail = adaptive_simpson(density, eps, half_pi, tol * scale);
    while (tail > 0.0 && tail < 1e-3 * scale) {
      scale = tail;
      tail = adaptive_simpson(density, eps, half_pi, tol * scale);
    }
  }
  return std::clamp(tail / (2.0 * half), 0.0, 0.5);
}

LevyBound levy_bound(double C, double c, double d, double eps) {
  if (!(C > 0.0) || !(c > 0.0)) throw std::invalid_argument("levy_bound: C and c must be positive");
  if (!(eps >= 0.0)) throw std::invalid_argument("levy_bound: eps must be >= 0");
  const double raw = C * std::exp(-c * eps * eps * d);
  return {raw, std::min(raw, 0.5)};
}

LipschitzReport lipschitz_deviation(const Dataset& ds, Eigen::Index pivot_id, double eps, DistanceCounter& counter,
                                    double alpha) {
  if (pivot_id < 0 || pivot_id >= ds.size()) throw std::out_of_range("lipschitz_deviation: pivot id out of range");
  if (!(eps > 0.0)) throw std::invalid_argument("lipschitz_deviation: eps must be > 0");
  const auto n = static_cast<std::size_t>(ds.size());
  std::vector<double> f(n);
  const std::size_t workers = worker_count();
  std::vector<DistanceCounter> local(workers);
  parallel_for(
      n,
      [&](std::size_t begin, std::size_t end, std::size_t w) {
        MeteredMetric rho(ds.metric(), local[w]);
        for (std::size_t x = begin; x < end; ++x) f[x] = rho(ds.point(static_cast<Eigen::Index>(x)), ds.point(pivot_id));
      },
      workers);
  for (const auto& c : local) counter += c;

  LipschitzReport report;
  report.median = lower_median(f);
  const auto deviating =
      std::count_if(f.begin(), f.end(), [&](double v) { return std::abs(v - report.median) > eps; });
  report.deviation_fraction = static_cast<double>(deviating) / static_cast<double>(n);
  report.bound = alpha >= 0.0 ? 2.0 * alpha : std::numeric_limits<double>::quiet_NaN();
  return report;
}

VcSpace parse_vc_space(std::string_view name) {
  if (name == "l2") return VcSpace::L2;
  if (name == "linf") return VcSpace::Linf;
  if (name == "hamming") return VcSpace::Hamming;
  throw std::invalid_argument("unknown space: " + std::string(name) + " (expected l2, linf, hamming)");
}

double vc_bound(VcSpace space, double d, double k) {
  if (!(d >= 1.0) || !(k >= 1.0)) throw std::invalid_argument("vc_bound: need d >= 1 and k >= 1");
  const double log_term = std::log(6.0 * k);
  switch (space) {
    case VcSpace::L2: return k * (8.0 * d + 12.0) * log_term;
    case VcSpace::Linf: return k * (16.0 * d + 4.0) * log_term;
    case VcSpace::Hamming: return k * (8.0 * d + 8.0 * std::log2(d) + 4.0) * log_term;
  }
  return 0.0;
}

double sample_size_bound(const BoundInputs& b) {
  if (!(b.eps > 0.0 && b.eps < 1.0)) throw std::invalid_argument("sample_size_bound: eps must lie in (0,1)");
  if (!(b.eta > 0.0 && b.eta < 1.0)) throw std::invalid_argument("sample_size_bound: eta must lie in (0,1)");
  if (!(b.delta >= 1.0)) throw std::invalid_argument("sample_size_bound: Delta must be >= 1");
  const double e2 = std::numbers::e * std::numbers::e;
  return 128.0 / (b.eps * b.eps) * (b.delta * std::log(2.0 * e2 / b.eps) + std::log(8.0 / b.eta));
}

double hoeffding_bound(double n, double eps) {
  if (!(n >= 0.0)) throw std::invalid_argument("hoeffding_bound: n must be >= 0");
  if (!(eps > 0.0)) throw std::invalid_argument("hoeffding_bound: eps must be > 0");
  return 2.0 * std::exp(-2.0 * n * eps * eps);
}

DiscardStatistics discard_statistics(const PivotIndex& idx, const Dataset& ds, std::span<const RangeQuery> queries,
                                     DistanceCounter& counter) {
  if (queries.empty()) throw std::invalid_argument("discard_statistics: no queries");
  DiscardStatistics stats;
  stats.fractions.resize(queries.size());
  std::vector<std::uint64_t> costs(queries.size());
  const std::size_t workers = worker_count();
  std::vector<DistanceCounter> local(workers);
  parallel_for(
      queries.size(),
      [&](std::size_t begin, std::size_t end, std::size_t w) {
        for (std::size_t i = begin; i < end; ++i) {
          const auto report = range_query(idx, ds, queries[i], local[w]);
          stats.fractions[i] = report.discard_fraction;
          costs[i] = report.cost;
        }
      },
      workers);
  for (const auto& c : local) counter += c;
  stats.cost = std::accumulate(costs.begin(), costs.end(), std::uint64_t{0});
  stats.median = lower_median(stats.fractions);
  return stats;
}

}  // namespace pivotbench
