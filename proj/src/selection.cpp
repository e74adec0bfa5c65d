#include "pivotbench/selection.hpp"

#include "pivotbench/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

namespace pivotbench {

void SelectionConfig::validate() const {
  if (k < 1) throw std::invalid_argument("selection: k must be >= 1");
  if (pair_count < 1) throw std::invalid_argument("selection: pair sample size A must be >= 1");
  if (candidates < 1) throw std::invalid_argument("selection: candidate count N must be >= 1");
  if (const auto* s = std::get_if<SmartKnn>(&pair_mode); s && s->j < 1)
    throw std::invalid_argument("selection: smart-pair neighbour rank must be >= 1");
}

PairSample random_pairs(const Dataset& ds, std::size_t pair_count, Seed seed) {
  const auto n = static_cast<std::uint64_t>(ds.size());
  if (n < 2) throw std::invalid_argument("random_pairs: need at least two points");
  Rng rng(seed, StreamDomain::Pairs, 0);
  PairSample out;
  out.pairs.reserve(pair_count);
  while (out.pairs.size() < pair_count) {
    const auto x = static_cast<Eigen::Index>(rng.below(n));
    const auto y = static_cast<Eigen::Index>(rng.below(n));
    if (x != y) out.pairs.emplace_back(x, y);
  }
  return out;
}

PairSample smart_pairs(const Dataset& ds, std::size_t pair_count, Eigen::Index j, Seed seed,
                       DistanceCounter& counter) {
  const Eigen::Index n = ds.size();
  if (j < 1 || j >= n)
    throw std::out_of_range("smart_pairs: neighbour rank j must lie in [1, n-1], got " + std::to_string(j));
  Rng rng(seed, StreamDomain::Centers, 0);
  std::vector<Eigen::Index> centers(pair_count);
  for (auto& c : centers) c = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));

  PairSample out;
  out.pairs.resize(pair_count);
  const std::size_t workers = worker_count();
  std::vector<DistanceCounter> local(workers);
  parallel_for(
      pair_count,
      [&](std::size_t begin, std::size_t end, std::size_t w) {
        MeteredMetric rho(ds.metric(), local[w]);
        std::vector<std::pair<double, Eigen::Index>> dists;
        dists.reserve(static_cast<std::size_t>(n - 1));
        for (std::size_t a = begin; a < end; ++a) {
          const Eigen::Index c = centers[a];
          dists.clear();
          for (Eigen::Index x = 0; x < n; ++x)
            if (x != c) dists.emplace_back(rho(ds.point(c), ds.point(x)), x);
          std::nth_element(dists.begin(), dists.begin() + (j - 1), dists.end());
          out.pairs[a] = {c, dists[static_cast<std::size_t>(j - 1)].second};
        }
      },
      workers);
  for (const auto& c : local) counter += c;
  return out;
}

PairObjective::PairObjective(PairSample pairs) : pairs_(std::move(pairs)), maxima_(pairs_.size(), 0.0) {
  if (pairs_.pairs.empty()) throw std::invalid_argument("pair sample is empty");
}

double PairObjective::mean() const {
  return std::accumulate(maxima_.begin(), maxima_.end(), 0.0) / static_cast<double>(maxima_.size());
}

std::vector<double> PairObjective::candidate_bounds(const Dataset& ds, Eigen::Index c,
                                                    DistanceCounter& counter) const {
  MeteredMetric rho(ds.metric(), counter);
  std::vector<double> bounds(pairs_.size());
  for (std::size_t a = 0; a < pairs_.size(); ++a) {
    const auto [x, y] = pairs_.pairs[a];
    bounds[a] = std::abs(rho(ds.point(x), ds.point(c)) - rho(ds.point(y), ds.point(c)));
  }
  return bounds;
}

double PairObjective::score(std::span<const double> bounds) const {
  double sum = 0.0;
  for (std::size_t a = 0; a < maxima_.size(); ++a) sum += std::max(maxima_[a], bounds[a]);
  return sum / static_cast<double>(maxima_.size());
}

void PairObjective::commit(std::span<const double> bounds) {
  for (std::size_t a = 0; a < maxima_.size(); ++a) maxima_[a] = std::max(maxima_[a], bounds[a]);
}

CandidateChoice choose_pivot(const Dataset& ds, PairObjective& objective,
                             std::span<const Eigen::Index> candidates, DistanceCounter& counter) {
  std::vector<Eigen::Index> unique(candidates.begin(), candidates.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  if (unique.empty()) throw std::invalid_argument("choose_pivot: no candidates");

  std::vector<double> means(unique.size());
  std::vector<std::vector<double>> bounds(unique.size());
  const std::size_t workers = worker_count();
  std::vector<DistanceCounter> local(workers);
  parallel_for(
      unique.size(),
      [&](std::size_t begin, std::size_t end, std::size_t w) {
        for (std::size_t i = begin; i < end; ++i) {
          bounds[i] = objective.candidate_bounds(ds, unique[i], local[w]);
          means[i] = objective.score(bounds[i]);
        }
      },
      workers);
  for (const auto& c : local) counter += c;

  // unique is ascending, so the first maximum is the lowest id.
  std::size_t best = 0;
  for (std::size_t i = 1; i < unique.size(); ++i)
    if (means[i] > means[best]) best = i;

  objective.commit(bounds[best]);
  return {unique[best], means[best]};
}

std::vector<Eigen::Index> select_incremental(const Dataset& ds, const PairSample& pairs, Eigen::Index k,
                                             std::size_t candidates, Seed seed, DistanceCounter& counter,
                                             std::vector<double>* objective_trace) {
  const Eigen::Index n = ds.size();
  if (candidates < 1) throw std::invalid_argument("select_incremental: N must be >= 1");
  if (k < 1 || k >= n) throw std::invalid_argument("select_incremental: need 1 <= k < n");

  PairObjective objective(pairs);
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  std::vector<Eigen::Index> pivots;
  std::vector<Eigen::Index> pool(candidates);
  for (Eigen::Index step = 0; step < k; ++step) {
    Rng rng(seed, StreamDomain::Candidates, static_cast<std::uint64_t>(step));
    for (auto& c : pool) {
      do {
        c = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
      } while (chosen[static_cast<std::size_t>(c)]);
    }
    const auto choice = choose_pivot(ds, objective, pool, counter);
    chosen[static_cast<std::size_t>(choice.id)] = true;
    pivots.push_back(choice.id);
    if (objective_trace) objective_trace->push_back(objective.mean());
  }
  return pivots;
}

std::vector<Eigen::Index> select_incremental(const Dataset& ds, const SelectionConfig& cfg,
                                             DistanceCounter& counter, std::vector<double>* objective_trace) {
  cfg.validate();
  if (cfg.k >= ds.size()) throw std::invalid_argument("select_incremental: need k < n");
  PairSample pairs = std::holds_alternative<SmartKnn>(cfg.pair_mode)
                         ? smart_pairs(ds, cfg.pair_count, std::get<SmartKnn>(cfg.pair_mode).j, cfg.seed, counter)
                         : random_pairs(ds, cfg.pair_count, cfg.seed);
  return select_incremental(ds, pairs, cfg.k, cfg.candidates, cfg.seed, counter, objective_trace);
}

std::vector<Eigen::Index> select_random(const Dataset& ds, Eigen::Index k, Seed seed) {
  const Eigen::Index n = ds.size();
  if (k < 1 || k > n) throw std::invalid_argument("select_random: need 1 <= k <= n");
  std::vector<Eigen::Index> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), Eigen::Index{0});
  Rng rng(seed, StreamDomain::Pivots, 0);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto r = i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(r)]);
  }
  ids.resize(static_cast<std::size_t>(k));
  return ids;
}

void write_pivots(std::span<const Eigen::Index> ids, std::ostream& out) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out << ' ';
    out << ids[i];
  }
  out << '\n';
}

std::vector<Eigen::Index> read_pivots(std::istream& in) {
  std::string line;
  std::getline(in, line);
  std::vector<Eigen::Index> ids;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    if (pos >= line.size()) break;
    std::size_t used = 0;
    ids.push_back(static_cast<Eigen::Index>(std::stoll(line.substr(pos), &used)));
    pos += used;
  }
  return ids;
}

}  // namespace pivotbench
