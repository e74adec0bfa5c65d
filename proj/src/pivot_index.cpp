#include "pivotbench/pivot_index.hpp"

#include "pivotbench/parallel.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <string>

namespace pivotbench {

PivotIndex::PivotIndex(std::vector<Eigen::Index> pivot_ids, PivotTable table, MetricKind metric)
    : pivot_ids_(std::move(pivot_ids)), table_(std::move(table)), metric_(metric) {
  if (pivot_ids_.empty()) throw std::invalid_argument("pivot index needs at least one pivot");
  if (table_.cols() != static_cast<Eigen::Index>(pivot_ids_.size()))
    throw DimensionMismatch(table_.cols(), static_cast<Eigen::Index>(pivot_ids_.size()));
  std::vector<bool> seen(static_cast<std::size_t>(table_.rows()), false);
  for (auto id : pivot_ids_) {
    if (id < 0 || id >= table_.rows())
      throw std::out_of_range("pivot id " + std::to_string(id) + " out of range");
    if (seen[static_cast<std::size_t>(id)])
      throw std::invalid_argument("duplicate pivot id " + std::to_string(id));
    seen[static_cast<std::size_t>(id)] = true;
  }
  if (!table_.allFinite() || (table_.array() < 0.0).any())
    throw std::invalid_argument("pivot table entries must be finite and non-negative");
}

RangeQuery::RangeQuery(Point center, double radius, std::optional<Eigen::Index> exclude_id)
    : center_(std::move(center)), radius_(radius), exclude_id_(exclude_id) {
  if (!std::isfinite(radius_) || radius_ < 0.0)
    throw std::invalid_argument("range query radius must be finite and >= 0");
}

PivotIndex build_index(const Dataset& ds, std::span<const Eigen::Index> pivot_ids,
                       DistanceCounter& counter) {
  const Eigen::Index n = ds.size();
  const Eigen::Index k = static_cast<Eigen::Index>(pivot_ids.size());
  if (k < 1) throw std::invalid_argument("build_index: need at least one pivot");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (auto id : pivot_ids) {
    if (id < 0 || id >= n) throw std::out_of_range("pivot id " + std::to_string(id) + " out of range");
    if (seen[static_cast<std::size_t>(id)])
      throw std::invalid_argument("duplicate pivot id " + std::to_string(id));
    seen[static_cast<std::size_t>(id)] = true;
  }

  PivotTable table(n, k);
  const std::size_t workers = worker_count();
  std::vector<DistanceCounter> local(workers);
  parallel_for(
      static_cast<std::size_t>(n),
      [&](std::size_t begin, std::size_t end, std::size_t w) {
        MeteredMetric rho(ds.metric(), local[w]);
        for (std::size_t x = begin; x < end; ++x)
          for (Eigen::Index i = 0; i < k; ++i)
            table(static_cast<Eigen::Index>(x), i) =
                rho(ds.point(static_cast<Eigen::Index>(x)), ds.point(pivot_ids[i]));
      },
      workers);
  for (const auto& c : local) counter += c;
  return PivotIndex({pivot_ids.begin(), pivot_ids.end()}, std::move(table), ds.metric());
}

namespace {

void check_consistent(const PivotIndex& idx, const Dataset& ds) {
  if (idx.size() != ds.size())
    throw std::invalid_argument("index size " + std::to_string(idx.size()) +
                                " does not match dataset size " + std::to_string(ds.size()));
  if (idx.metric() != ds.metric()) throw std::invalid_argument("index metric differs from dataset metric");
}

/// rho_k with early exit once the bound exceeds `limit`. A bound within a few
/// ulps of `limit` is not trusted: rounding in the stored distances can push
/// |rho(q,p) - rho(x,p)| just past rho(q,x) when the triangle is degenerate.
inline bool exceeds(const PivotTable& table, const Eigen::VectorXd& qd, Eigen::Index x, double limit) {
  constexpr double slack = 8.0 * std::numeric_limits<double>::epsilon();
  auto row = table.row(x);
  for (Eigen::Index i = 0; i < qd.size(); ++i)
    if (std::abs(qd[i] - row[i]) - limit > slack * std::max(qd[i], row[i])) return true;
  return false;
}

}  // namespace

Eigen::VectorXd pivot_distances(const PivotIndex& idx, const Dataset& ds, const Point& q,
                                DistanceCounter& counter) {
  MeteredMetric rho(ds.metric(), counter);
  Eigen::VectorXd qd(idx.pivot_count());
  for (Eigen::Index i = 0; i < idx.pivot_count(); ++i) qd[i] = rho(q, ds.point(idx.pivot_ids()[i]));
  return qd;
}

QueryReport range_query(const PivotIndex& idx, const Dataset& ds, const RangeQuery& query,
                        DistanceCounter& counter) {
  check_consistent(idx, ds);
  ds.check_center(query.center());
  const double r = query.radius();
  const Eigen::Index excluded = query.exclude_id().value_or(-1);

  DistanceCounter local;
  const Eigen::VectorXd qd = pivot_distances(idx, ds, query.center(), local);
  MeteredMetric rho(ds.metric(), local);

  QueryReport report;
  report.radius = r;
  for (Eigen::Index x = 0; x < ds.size(); ++x) {
    if (x == excluded || exceeds(idx.table(), qd, x, r)) {
      ++report.discarded;
      continue;
    }
    const double dist = rho(query.center(), ds.point(x));
    if (dist <= r) {
      report.result_ids.push_back(x);
      report.result_dists.push_back(dist);
    }
  }
  report.cost = local.count;
  report.discard_fraction = static_cast<double>(report.discarded) / static_cast<double>(ds.size());
  counter += local;
  return report;
}

namespace {

struct Candidate {
  double dist;
  Eigen::Index id;
  bool operator<(const Candidate& o) const { return dist < o.dist || (dist == o.dist && id < o.id); }
};

QueryReport finish_knn(std::priority_queue<Candidate> heap, std::uint64_t discarded,
                       const DistanceCounter& local, Eigen::Index n) {
  QueryReport report;
  report.radius = heap.empty() ? 0.0 : heap.top().dist;
  std::vector<Candidate> found;
  found.reserve(heap.size());
  while (!heap.empty()) {
    found.push_back(heap.top());
    heap.pop();
  }
  std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) { return a.id < b.id; });
  for (const auto& c : found) {
    report.result_ids.push_back(c.id);
    report.result_dists.push_back(c.dist);
  }
  report.discarded = discarded;
  report.cost = local.count;
  report.discard_fraction = static_cast<double>(discarded) / static_cast<double>(n);
  return report;
}

}  // namespace

QueryReport knn_query(const PivotIndex& idx, const Dataset& ds, const Point& center,
                      Eigen::Index k_nn, DistanceCounter& counter) {
  check_consistent(idx, ds);
  ds.check_center(center);
  if (k_nn < 1 || k_nn > ds.size())
    throw std::out_of_range("k_nn must lie in [1, n], got " + std::to_string(k_nn));

  DistanceCounter local;
  const Eigen::VectorXd qd = pivot_distances(idx, ds, center, local);
  MeteredMetric rho(ds.metric(), local);

  std::priority_queue<Candidate> heap;
  double radius = std::numeric_limits<double>::infinity();
  std::uint64_t discarded = 0;
  for (Eigen::Index x = 0; x < ds.size(); ++x) {
    if (exceeds(idx.table(), qd, x, radius)) {
      ++discarded;
      continue;
    }
    const Candidate c{rho(center, ds.point(x)), x};
    if (static_cast<Eigen::Index>(heap.size()) < k_nn) {
      heap.push(c);
    } else if (c < heap.top()) {
      heap.pop();
      heap.push(c);
    }
    if (static_cast<Eigen::Index>(heap.size()) == k_nn) radius = heap.top().dist;
  }
  counter += local;
  return finish_knn(std::move(heap), discarded, local, ds.size());
}

QueryReport proportion_query(const PivotIndex& idx, const Dataset& ds, const Point& center,
                             double fraction, DistanceCounter& counter) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw std::invalid_argument("proportion must lie in (0, 1]");
  const auto k_nn = static_cast<Eigen::Index>(std::ceil(fraction * static_cast<double>(ds.size())));
  return knn_query(idx, ds, center, std::clamp<Eigen::Index>(k_nn, 1, ds.size()), counter);
}

QueryReport linear_scan(const Dataset& ds, const RangeQuery& query, DistanceCounter& counter) {
  ds.check_center(query.center());
  DistanceCounter local;
  MeteredMetric rho(ds.metric(), local);
  QueryReport report;
  report.radius = query.radius();
  for (Eigen::Index x = 0; x < ds.size(); ++x) {
    const double dist = rho(query.center(), ds.point(x));
    if (dist <= query.radius()) {
      report.result_ids.push_back(x);
      report.result_dists.push_back(dist);
    }
  }
  report.cost = local.count;
  counter += local;
  return report;
}

void write_index(const PivotIndex& idx, std::ostream& out) {
  out << idx.pivot_count() << ' ' << idx.size() << '\n';
  for (std::size_t i = 0; i < idx.pivot_ids().size(); ++i) {
    if (i) out << ' ';
    out << idx.pivot_ids()[i];
  }
  out << '\n';
  for (Eigen::Index x = 0; x < idx.size(); ++x) {
    for (Eigen::Index i = 0; i < idx.pivot_count(); ++i) {
      if (i) out << ' ';
      out << format_real(idx.table()(x, i));
    }
    out << '\n';
  }
}

void save_index(const PivotIndex& idx, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write index file: " + path.string());
  write_index(idx, out);
}

PivotIndex load_index(const std::filesystem::path& path, MetricKind metric) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open index file: " + path.string());
  const std::string name = path.string();
  long long k = 0, n = 0;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(name, 1, "missing header");
  {
    std::istringstream hs(line);
    if (!(hs >> k >> n) || k < 1 || n < 1) throw ParseError(name, 1, "malformed header, expected \"<k> <n>\"");
  }
  std::vector<Eigen::Index> ids(static_cast<std::size_t>(k));
  if (!std::getline(in, line)) throw ParseError(name, 2, "missing pivot id line");
  {
    std::istringstream is(line);
    for (auto& id : ids)
      if (!(is >> id)) throw ParseError(name, 2, "expected " + std::to_string(k) + " pivot ids");
  }
  PivotTable table(n, k);
  for (long long x = 0; x < n; ++x) {
    if (!std::getline(in, line)) throw ParseError(name, static_cast<std::size_t>(x) + 3, "missing table row");
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (long long i = 0; i < k; ++i) {
      while (p < end && *p == ' ') ++p;
      double v;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) throw ParseError(name, static_cast<std::size_t>(x) + 3, "bad table entry");
      table(x, i) = v;
      p = next;
    }
  }
  return PivotIndex(std::move(ids), std::move(table), metric);
}

}  // namespace pivotbench
