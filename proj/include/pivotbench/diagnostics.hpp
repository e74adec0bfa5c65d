#pragma once

#include "pivotbench/pivot_index.hpp"

#include <span>
#include <vector>

namespace pivotbench {

/// d~ = mean^2 / (2 var) over sampled pairwise distances.
struct ChavezEstimate {
  double mean = 0.0;
  double variance = 0.0;  ///< Bessel-corrected
  double dtilde = 0.0;    ///< +inf when variance == 0
  std::size_t pairs_used = 0;
  bool infinite = false;
};

ChavezEstimate chavez_dimension(const Dataset& ds, std::size_t pairs, Seed seed, DistanceCounter& counter);

struct Histogram {
  std::vector<double> edges;  ///< bins + 1 ascending edges
  std::vector<std::uint64_t> counts;
  double mean = 0.0;
  double stddev = 0.0;  ///< Bessel-corrected
};

/// Histogram of sampled pairwise distances, divided by sqrt(d) when normalize is set.
Histogram distance_histogram(const Dataset& ds, std::size_t pairs, std::size_t bins, bool normalize, Seed seed,
                             DistanceCounter& counter);

/// Equal-width histogram of arbitrary values over [min, max]; the last edge is inclusive.
Histogram make_histogram(std::span<const double> values, std::size_t bins);

/// Lower median (the smaller middle element for even sizes).
double lower_median(std::vector<double> values);

/// Median brute-force NN distance over `queries` centers. Centers are fresh
/// generator draws when the dataset has a source; otherwise dataset points
/// (all of them when queries >= n, else a random subset) with self excluded.
double median_nn_distance(const Dataset& ds, std::size_t queries, Seed seed, DistanceCounter& counter);

/// Exact concentration function of the unit sphere in R^d at geodesic radius eps:
///   alpha_d(eps) = int_eps^{pi/2} cos^{d-2} / int_{-pi/2}^{pi/2} cos^{d-2},
/// by adaptive Simpson quadrature. Requires d >= 2, eps in [0, pi/2].
double sphere_concentration(int d, double eps);

/// Adaptive Simpson on [a, b]; bisects until |S2 - S1| < 15 tol per subinterval.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 60);

struct LevyBound {
  double raw = 0.0;       ///< C exp(-c eps^2 d)
  double reported = 0.0;  ///< min(raw, 1/2)
};
LevyBound levy_bound(double C, double c, double d, double eps);

struct LipschitzReport {
  double median = 0.0;              ///< lower median of f = rho(., p)
  double deviation_fraction = 0.0;  ///< fraction with |f - M| > eps
  double bound = 0.0;               ///< 2 alpha(eps), when the caller supplies alpha
};

/// f = rho(., pivot) over the whole dataset. `alpha` is the analytic
/// concentration value to report against (pass a negative value to skip).
LipschitzReport lipschitz_deviation(const Dataset& ds, Eigen::Index pivot_id, double eps, DistanceCounter& counter,
                                    double alpha = -1.0);

enum class VcSpace { L2, Linf, Hamming };
VcSpace parse_vc_space(std::string_view name);

/// VC-dimension upper bounds for k-pivot discard sets:
///   L2: k(8d+12) ln 6k,  Linf: k(16d+4) ln 6k,  Hamming: k(8d + 8 log2 d + 4) ln 6k.
double vc_bound(VcSpace space, double d, double k);

struct BoundInputs {
  double delta = 1.0;  ///< VC dimension
  double eps = 0.5;
  double eta = 0.5;
};

/// (128/eps^2)(Delta ln(2e^2/eps) + ln(8/eta)).
double sample_size_bound(const BoundInputs& b);

/// 2 exp(-2 n eps^2).
double hoeffding_bound(double n, double eps);

struct DiscardStatistics {
  std::vector<double> fractions;
  double median = 0.0;
  std::uint64_t cost = 0;
};

DiscardStatistics discard_statistics(const PivotIndex& idx, const Dataset& ds, std::span<const RangeQuery> queries,
                                     DistanceCounter& counter);

// -- implementation ----------------------------------------------------------

namespace detail {
template <typename F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace pivotbench
