#include "oracles.hpp"

#include <pivotbench/pivot_index.hpp>
#include <pivotbench/selection.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <vector>

using namespace pivotbench;
using oracle::line;
using oracle::point;

namespace {
const std::vector<Eigen::Index> kFirst{0};

/// A radius that captures about `fraction` of the dataset, landing exactly on a point.
double quantile_radius(const Dataset& ds, const Point& q, double fraction) {
  std::vector<double> d;
  // Library kernel, so the boundary point sits exactly at the radius.
  for (Eigen::Index x = 0; x < ds.size(); ++x) d.push_back(evaluate(ds.metric(), q, ds.point(x)));
  std::sort(d.begin(), d.end());
  return d[static_cast<std::size_t>(fraction * static_cast<double>(d.size()))];
}
}  // namespace

TEST(BuildIndex, AccountingAndTable) {
  const auto ds = line({0, 1, 10});
  DistanceCounter c;
  const std::vector<Eigen::Index> two{0, 2};
  const auto idx = build_index(ds, two, c);
  EXPECT_EQ(c.count, 6u);
  EXPECT_EQ(idx.table()(0, 0), 0.0);
  EXPECT_EQ(idx.table()(2, 1), 0.0);

  const auto one = build_index(ds, kFirst, c);
  EXPECT_EQ(one.table()(0, 0), 0.0);
  EXPECT_EQ(one.table()(1, 0), 1.0);
  EXPECT_EQ(one.table()(2, 0), 10.0);
}

TEST(BuildIndex, RejectsBadPivots) {
  const auto ds = line({0, 1, 10});
  DistanceCounter c;
  EXPECT_THROW(build_index(ds, std::vector<Eigen::Index>{0, 0}, c), std::invalid_argument);
  EXPECT_THROW(build_index(ds, std::vector<Eigen::Index>{3}, c), std::out_of_range);
  EXPECT_THROW(build_index(ds, std::vector<Eigen::Index>{}, c), std::invalid_argument);
  EXPECT_EQ(c.count, 0u);
}

TEST(BuildIndex, TableMatchesFreshEvaluation) {
  const auto ds = gen_uniform_cube(6, 500, Seed{3});
  DistanceCounter c;
  const auto pivots = select_random(ds, 7, Seed{3});
  const auto idx = build_index(ds, pivots, c);
  for (Eigen::Index x = 0; x < ds.size(); ++x)
    for (Eigen::Index i = 0; i < 7; ++i) ASSERT_EQ(idx.table()(x, i), evaluate(ds.metric(), ds.point(x), ds.point(pivots[i])));
}

TEST(RhoK, Examples) {
  PivotTable t(1, 2);
  t << 0.5, 0.7;
  PivotIndex idx({0, 1}, PivotTable(t.replicate(2, 1)), MetricKind::Euclidean);
  Eigen::VectorXd q(2);
  q << 0.9, 0.2;
  EXPECT_DOUBLE_EQ(rho_k(idx, q, 0), 0.5);
  q << 0.5, 0.7;
  EXPECT_EQ(rho_k(idx, q, 1), 0.0);
  EXPECT_THROW(rho_k(idx, Eigen::VectorXd(3), 0), DimensionMismatch);
}

TEST(RhoK, LowerBoundsTheMetric) {
  const auto ds = gen_uniform_cube(8, 2000, Seed{10});
  DistanceCounter c;
  const auto idx = build_index(ds, select_random(ds, 6, Seed{10}), c);
  Rng rng(Seed{10}, StreamDomain::Queries, 0);
  for (int t = 0; t < 10'000; ++t) {
    const Point q = draw_point(*ds.source(), StreamDomain::Queries, t);
    const auto x = static_cast<Eigen::Index>(rng.below(ds.size()));
    DistanceCounter qc;
    const auto qd = pivot_distances(idx, ds, q, qc);
    const std::uint64_t before = qc.count;
    const double lb = rho_k(idx, qd, x);
    EXPECT_EQ(qc.count, before);
    ASSERT_LE(lb, oracle::dist(ds, q, x) + 1e-9);
  }
}

TEST(RangeQuery, HandEvaluatedExample) {
  const auto ds = line({0, 1, 10});
  DistanceCounter c;
  const auto idx = build_index(ds, kFirst, c);
  DistanceCounter qc;
  const auto r = range_query(idx, ds, RangeQuery(point({0.4}), 0.5), qc);
  EXPECT_EQ(r.result_ids, (std::vector<Eigen::Index>{0}));
  EXPECT_EQ(r.discarded, 2u);
  EXPECT_EQ(r.cost, 2u);
  EXPECT_EQ(qc.count, 2u);
  DistanceCounter lc;
  EXPECT_EQ(linear_scan(ds, RangeQuery(point({0.4}), 0.5), lc).result_ids, r.result_ids);
}

TEST(RangeQuery, LargeRadiusScansEverything) {
  const auto ds = gen_uniform_cube(4, 300, Seed{1});
  DistanceCounter c;
  const auto idx = build_index(ds, select_random(ds, 5, Seed{1}), c);
  const auto r = range_query(idx, ds, RangeQuery(point({0.5, 0.5, 0.5, 0.5}), 2.0), c);
  EXPECT_EQ(r.result_ids.size(), 300u);
  EXPECT_EQ(r.cost, 305u);
  EXPECT_EQ(r.discarded, 0u);
}

TEST(RangeQuery, PivotCenterMakesTheFilterExact) {
  const auto ds = gen_uniform_cube(5, 1000, Seed{6});
  DistanceCounter c;
  const auto pivots = select_random(ds, 4, Seed{6});
  const auto idx = build_index(ds, pivots, c);
  for (double r : {0.1, 0.3, 0.6}) {
    DistanceCounter qc;
    const auto rep = range_query(idx, ds, RangeQuery(Point(ds.point(pivots[2])), r), qc);
    EXPECT_EQ(rep.cost, 4u + rep.result_ids.size());
  }
}

TEST(RangeQuery, RejectsBadInput) {
  EXPECT_THROW(RangeQuery(point({0}), -0.1), std::invalid_argument);
  EXPECT_THROW(RangeQuery(point({0}), std::numeric_limits<double>::infinity()), std::invalid_argument);
  const auto ds = line({0, 1, 10});
  DistanceCounter c;
  const auto idx = build_index(ds, kFirst, c);
  EXPECT_THROW(range_query(idx, ds, RangeQuery(point({0, 0}), 1), c), DimensionMismatch);
  EXPECT_THROW(linear_scan(ds, RangeQuery(point({0, 0}), 1), c), DimensionMismatch);
}

TEST(RangeQuery, ExcludedCenterIsDiscardedFree) {
  const auto ds = line({0, 1, 2, 3});
  DistanceCounter c;
  const auto idx = build_index(ds, std::vector<Eigen::Index>{3}, c);
  DistanceCounter qc;
  const auto rep = range_query(idx, ds, RangeQuery(point({1}), 1.0, 1), qc);
  EXPECT_EQ(rep.result_ids, (std::vector<Eigen::Index>{0, 2}));
  EXPECT_EQ(rep.cost, 1u + 4u - rep.discarded);
  EXPECT_EQ(rep.cost, qc.count);
}

TEST(LinearScan, CostAndIdentity) {
  const auto ds = gen_uniform_cube(3, 1000, Seed{2});
  DistanceCounter c;
  const auto r = linear_scan(ds, RangeQuery(Point(ds.point(17)), 0.0), c);
  EXPECT_EQ(r.cost, 1000u);
  EXPECT_EQ(c.count, 1000u);
  EXPECT_EQ(r.result_ids, (std::vector<Eigen::Index>{17}));
}

class OracleEquivalence : public ::testing::TestWithParam<Generator> {};

TEST_P(OracleEquivalence, RangeMatchesLinearScanAndCostIdentityHolds) {
  for (std::uint64_t trial = 0; trial < 40; ++trial) {
    const Eigen::Index d = std::array<Eigen::Index, 4>{2, 8, 20, 64}[trial % 4];
    const auto ds = generate(GetParam(), d, 400, Seed{trial});
    DistanceCounter c;
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(trial % 9);
    const auto idx = build_index(ds, select_random(ds, k, Seed{trial}), c);
    const Point q = draw_point(*ds.source(), StreamDomain::Queries, trial);
    const double r = quantile_radius(ds, q, 0.01 + 0.05 * static_cast<double>(trial % 5));
    DistanceCounter qc;
    const auto rep = range_query(idx, ds, RangeQuery(q, r), qc);
    DistanceCounter lc;
    ASSERT_EQ(rep.result_ids, linear_scan(ds, RangeQuery(q, r), lc).result_ids);
    ASSERT_FALSE(rep.result_ids.empty());
    ASSERT_EQ(rep.cost, qc.count);
    ASSERT_EQ(rep.cost, static_cast<std::uint64_t>(k + ds.size()) - rep.discarded);
  }
}

INSTANTIATE_TEST_SUITE_P(Generators, OracleEquivalence,
                         ::testing::Values(Generator::Cube, Generator::Sphere, Generator::Hamming));

TEST(RangeQuery, MorePivotsNeverScanMore) {
  const auto ds = gen_uniform_cube(6, 2000, Seed{12});
  const auto order = select_random(ds, 24, Seed{12});
  std::vector<PivotIndex> nested;
  DistanceCounter c;
  for (Eigen::Index k : {1, 3, 6, 12, 24})
    nested.push_back(build_index(ds, std::span(order).first(static_cast<std::size_t>(k)), c));
  for (std::uint64_t t = 0; t < 50; ++t) {
    const RangeQuery q(draw_point(*ds.source(), StreamDomain::Queries, t), 0.35);
    std::uint64_t prev_scanned = ~0ULL;
    for (const auto& idx : nested) {
      DistanceCounter qc;
      const auto rep = range_query(idx, ds, q, qc);
      const std::uint64_t scanned = ds.size() - rep.discarded;
      ASSERT_LE(scanned, prev_scanned);
      prev_scanned = scanned;
    }
  }
}

TEST(KnnQuery, Examples) {
  const auto ds = line({0, 1, 10});
  DistanceCounter c;
  const auto idx = build_index(ds, kFirst, c);
  DistanceCounter qc;
  EXPECT_EQ(knn_query(idx, ds, point({0.4}), 1, qc).result_ids, (std::vector<Eigen::Index>{0}));
  const auto all = knn_query(idx, ds, point({0.4}), 3, qc);
  EXPECT_EQ(all.result_ids.size(), 3u);
  EXPECT_EQ(all.cost, 1u + 3u);
  EXPECT_THROW(knn_query(idx, ds, point({0.4}), 0, qc), std::out_of_range);
  EXPECT_THROW(knn_query(idx, ds, point({0.4}), 4, qc), std::out_of_range);
}

TEST(KnnQuery, TiesGoToLowerId) {
  const auto ds = line({2, 0, 2, 4});
  DistanceCounter c;
  const auto idx = build_index(ds, std::vector<Eigen::Index>{3}, c);
  EXPECT_EQ(knn_query(idx, ds, point({1}), 2, c).result_ids, (std::vector<Eigen::Index>{0, 1}));
}

TEST(KnnQuery, MatchesBruteForceAndRangeConsistency) {
  const auto ds = gen_uniform_cube(8, 1000, Seed{21});
  DistanceCounter c;
  const auto idx = build_index(ds, select_random(ds, 8, Seed{21}), c);
  for (std::uint64_t t = 0; t < 100; ++t) {
    const Point q = draw_point(*ds.source(), StreamDomain::Queries, t);
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(t % 25);
    DistanceCounter qc;
    const auto rep = knn_query(idx, ds, q, k, qc);
    ASSERT_EQ(rep.result_ids, oracle::knn(ds, q, k));
    ASSERT_EQ(rep.cost, qc.count);
    ASSERT_EQ(rep.cost, static_cast<std::uint64_t>(8 + ds.size()) - rep.discarded);
    // The k-th best distance is the smallest radius returning >= k points.
    DistanceCounter rc;
    EXPECT_GE(range_query(idx, ds, RangeQuery(q, rep.radius), rc).result_ids.size(), static_cast<std::size_t>(k));
    EXPECT_LT(range_query(idx, ds, RangeQuery(q, std::nextafter(rep.radius, 0.0)), rc).result_ids.size(),
              static_cast<std::size_t>(k));
  }
}

TEST(ProportionQuery, IsCeilFractionKnn) {
  const auto ds = gen_uniform_cube(3, 101, Seed{2});
  DistanceCounter c;
  const auto idx = build_index(ds, select_random(ds, 3, Seed{2}), c);
  EXPECT_EQ(proportion_query(idx, ds, Point(ds.point(0)), 0.1, c).result_ids.size(), 11u);
  EXPECT_EQ(proportion_query(idx, ds, Point(ds.point(0)), 1.0, c).result_ids.size(), 101u);
  EXPECT_THROW(proportion_query(idx, ds, Point(ds.point(0)), 0.0, c), std::invalid_argument);
}

TEST(IndexFile, RoundTrip) {
  const auto ds = gen_uniform_sphere(5, 200, Seed{4});
  DistanceCounter c;
  const auto idx = build_index(ds, select_random(ds, 6, Seed{4}), c);
  const auto path = std::filesystem::temp_directory_path() / "pivotbench_index.txt";
  save_index(idx, path);
  const auto back = load_index(path, ds.metric());
  EXPECT_EQ(back.pivot_ids(), idx.pivot_ids());
  EXPECT_TRUE(back.table() == idx.table());
}
