#include "pivotbench/harness.hpp"

#include "pivotbench/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace pivotbench {

Dataset DatasetSpec::materialize() const {
  if (!generator && file.empty()) throw std::invalid_argument("dataset spec names neither a generator nor a file");
  Dataset ds = generator ? generate(*generator, dim, count, seed) : load_ascii(file);
  if (metric) ds.set_metric(*metric);
  return ds;
}

std::string SelectionStrategy::name() const {
  if (mode == SelectionMode::Random) return "random";
  if (const auto* s = std::get_if<SmartKnn>(&pair_mode)) return "incremental-smart" + std::to_string(s->j);
  return "incremental";
}

void ExperimentConfig::validate() const {
  if (k_sweep.empty()) throw std::invalid_argument("sweep: k list is empty");
  if (!std::is_sorted(k_sweep.begin(), k_sweep.end())) throw std::invalid_argument("sweep: k list must be ascending");
  if (k_sweep.front() < 1) throw std::invalid_argument("sweep: every k must be >= 1");
  if (strategies.empty()) throw std::invalid_argument("sweep: no selection strategy");
  if (query_count < 1) throw std::invalid_argument("sweep: query count must be >= 1");
  if (probe_count < 1) throw std::invalid_argument("sweep: probe count must be >= 1");
  if (!(target_fraction > 0.0 && target_fraction <= 1.0))
    throw std::invalid_argument("sweep: target fraction must lie in (0, 1]");
  for (const auto& s : strategies)
    SelectionConfig{1, pair_count, candidates, seed, s.pair_mode}.validate();
}

namespace {

std::vector<Eigen::Index> distinct_ids(Eigen::Index n, std::size_t count, Seed seed, StreamDomain domain) {
  std::vector<Eigen::Index> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), Eigen::Index{0});
  if (count >= ids.size()) return ids;
  Rng rng(seed, domain, 0);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t r = i + static_cast<std::size_t>(rng.below(ids.size() - i));
    std::swap(ids[i], ids[r]);
  }
  ids.resize(count);
  return ids;
}

}  // namespace

CalibratedRadius calibrate_radius(const Dataset& ds, double target_fraction, std::size_t probe_count, Seed seed,
                                  DistanceCounter& counter) {
  if (!(target_fraction > 0.0 && target_fraction <= 1.0))
    throw std::invalid_argument("calibrate_radius: target fraction must lie in (0, 1]");
  if (probe_count < 1) throw std::invalid_argument("calibrate_radius: need at least one probe");
  const Eigen::Index n = ds.size();
  const bool fresh = ds.source().has_value();
  if (!fresh && n < 2) throw std::invalid_argument("calibrate_radius: leave-one-out needs n >= 2");

  std::vector<Eigen::Index> self_ids;
  if (!fresh) self_ids = distinct_ids(n, probe_count, seed, StreamDomain::Probes);
  const std::size_t probes = fresh ? probe_count : self_ids.size();
  const std::size_t per_probe = static_cast<std::size_t>(fresh ? n : n - 1);

  std::vector<double> pool(probes * per_probe);
  const std::size_t workers = worker_count();
  std::vector<DistanceCounter> local(workers);
  parallel_for(
      probes,
      [&](std::size_t begin, std::size_t end, std::size_t w) {
        MeteredMetric rho(ds.metric(), local[w]);
        for (std::size_t p = begin; p < end; ++p) {
          Point q;
          Eigen::Index skip = -1;
          if (fresh) {
            GeneratorSpec spec = *ds.source();
            spec.seed = seed;
            q = draw_point(spec, StreamDomain::Probes, p);
          } else {
            skip = self_ids[p];
            q = ds.point(skip);
          }
          double* out = pool.data() + p * per_probe;
          for (Eigen::Index x = 0; x < n; ++x)
            if (x != skip) *out++ = rho(q, ds.point(x));
        }
      },
      workers);
  for (const auto& c : local) counter += c;

  const auto m = pool.size();
  auto rank = static_cast<std::size_t>(std::ceil(target_fraction * static_cast<double>(m)));
  rank = std::clamp<std::size_t>(rank, 1, m) - 1;
  std::nth_element(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(rank), pool.end());
  CalibratedRadius out{pool[rank], false};
  const auto [lo, hi] = std::minmax_element(pool.begin(), pool.end());
  out.degenerate = *lo == *hi;
  return out;
}

RangeQuery sweep_query(const Dataset& ds, double radius, Seed seed, StreamDomain domain, std::uint64_t index) {
  if (ds.source()) {
    GeneratorSpec spec = *ds.source();
    spec.seed = seed;
    return RangeQuery(draw_point(spec, domain, index), radius);
  }
  Rng rng(seed, domain, index);
  const auto id = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(ds.size())));
  return RangeQuery(ds.point(id), radius, id);
}

std::vector<ExperimentRow> run_sweep(const ExperimentConfig& cfg, const RowSink& sink) {
  cfg.validate();
  return run_sweep(cfg, cfg.dataset.materialize(), sink);
}

std::vector<ExperimentRow> run_sweep(const ExperimentConfig& cfg, const Dataset& ds, const RowSink& sink) {
  cfg.validate();
  if (cfg.k_sweep.back() >= ds.size()) throw std::invalid_argument("sweep: every k must be < n");

  DistanceCounter calibration;
  const auto radius = calibrate_radius(ds, cfg.target_fraction, cfg.probe_count, cfg.seed, calibration).radius;

  std::vector<RangeQuery> queries;
  queries.reserve(cfg.query_count);
  for (std::size_t q = 0; q < cfg.query_count; ++q)
    queries.push_back(sweep_query(ds, radius, cfg.seed, StreamDomain::Queries, q));

  std::vector<ExperimentRow> rows;
  for (const Eigen::Index k : cfg.k_sweep) {
    for (const auto& strategy : cfg.strategies) {
      DistanceCounter build;
      std::vector<Eigen::Index> pivots;
      if (strategy.mode == SelectionMode::Random) {
        pivots = select_random(ds, k, cfg.seed);
      } else {
        const SelectionConfig sel{k, cfg.pair_count, cfg.candidates, cfg.seed, strategy.pair_mode};
        pivots = select_incremental(ds, sel, build);
      }
      const PivotIndex idx = build_index(ds, pivots, build);

      std::vector<std::uint64_t> costs(queries.size());
      std::vector<std::size_t> sizes(queries.size());
      std::vector<double> fractions(queries.size());
      const std::size_t workers = worker_count();
      std::vector<DistanceCounter> local(workers);
      parallel_for(
          queries.size(),
          [&](std::size_t begin, std::size_t end, std::size_t w) {
            for (std::size_t q = begin; q < end; ++q) {
              const auto report = range_query(idx, ds, queries[q], local[w]);
              costs[q] = report.cost;
              sizes[q] = report.result_ids.size();
              fractions[q] = report.discard_fraction;
            }
          },
          workers);
      DistanceCounter query_phase;
      for (const auto& c : local) query_phase += c;

      ExperimentRow row;
      row.d = ds.dim();
      row.n = ds.size();
      row.k = k;
      row.selection_mode = strategy.name();
      row.radius = radius;
      row.query_count = queries.size();
      row.query_cost_total = std::accumulate(costs.begin(), costs.end(), std::uint64_t{0});
      row.query_counter_delta = query_phase.count;
      if (row.query_cost_total != row.query_counter_delta)
        throw std::logic_error("sweep: per-query costs disagree with the distance counter");
      row.avg_cost = static_cast<double>(row.query_cost_total) / static_cast<double>(queries.size());
      row.avg_result_size = static_cast<double>(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0})) /
                            static_cast<double>(queries.size());
      row.median_discard_fraction = lower_median(fractions);
      row.build_cost = build.count;
      row.seed = cfg.seed.value;
      if (sink) sink(row);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_csv_row(const ExperimentRow& row, std::ostream& out) {
  out << row.d << ',' << row.n << ',' << row.k << ',' << row.selection_mode << ',' << format_real(row.radius) << ','
      << format_real(row.avg_cost) << ',' << format_real(row.avg_result_size) << ','
      << format_real(row.median_discard_fraction) << ',' << row.build_cost << ',' << row.seed << '\n';
}

}  // namespace pivotbench
