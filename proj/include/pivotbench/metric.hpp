#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pivotbench {

using Point = Eigen::RowVectorXd;
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class MetricKind {
  Euclidean,
  Chebyshev,
  HammingNormalized,
  HammingRaw,
  /// Great-circle angle between the directions of x and y; radians in [0, pi].
  Geodesic,
};

std::string_view to_string(MetricKind kind);
/// Accepts l2/euclidean, linf/chebyshev, hamming, hamming-raw, geodesic.
MetricKind parse_metric(std::string_view name);

constexpr bool is_hamming(MetricKind kind) {
  return kind == MetricKind::HammingNormalized || kind == MetricKind::HammingRaw;
}

/// Number of metric evaluations; the unit every cost in the library is measured in.
struct DistanceCounter {
  std::uint64_t count = 0;

  void charge(std::uint64_t n = 1) noexcept { count += n; }
  DistanceCounter& operator+=(const DistanceCounter& other) noexcept {
    count += other.count;
    return *this;
  }
};

class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(Eigen::Index a, Eigen::Index b)
      : std::invalid_argument("dimension mismatch: " + std::to_string(a) + " vs " +
                              std::to_string(b)) {}
};

class NonBinaryInput : public std::invalid_argument {
 public:
  NonBinaryInput() : std::invalid_argument("Hamming metric requires coordinates in {0,1}") {}
};

template <typename Derived>
bool is_binary(const Eigen::MatrixBase<Derived>& x) {
  return ((x.array() == 0.0) || (x.array() == 1.0)).all();
}

/// Raw metric kernel: no validation and no accounting. Library code reaches it
/// through MeteredMetric so that every call is charged.
template <typename A, typename B>
double evaluate(MetricKind kind, const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) {
  switch (kind) {
    case MetricKind::Euclidean:
      return (x - y).norm();
    case MetricKind::Chebyshev:
      return x.size() == 0 ? 0.0 : (x - y).cwiseAbs().maxCoeff();
    case MetricKind::HammingRaw:
      return static_cast<double>((x.array() != y.array()).count());
    case MetricKind::HammingNormalized:
      return static_cast<double>((x.array() != y.array()).count()) /
             static_cast<double>(x.size());
    case MetricKind::Geodesic: {
      if (x == y) return 0.0;
      const Point u = x / x.norm();
      const Point v = y / y.norm();
      // Stable for both tiny and near-antipodal angles.
      return 2.0 * std::atan2((u - v).norm(), (u + v).norm());
    }
  }
  return 0.0;
}

/// Metric bound to a counter; each call charges exactly one evaluation.
class MeteredMetric {
 public:
  MeteredMetric(MetricKind kind, DistanceCounter& counter) : kind_(kind), counter_(&counter) {}

  template <typename A, typename B>
  double operator()(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) const {
    counter_->charge();
    return evaluate(kind_, x, y);
  }

  MetricKind kind() const { return kind_; }

 private:
  MetricKind kind_;
  DistanceCounter* counter_;
};

/// Checked distance: validates dimensions (and binarity for Hamming kinds),
/// then charges one evaluation.
template <typename A, typename B>
double distance(MetricKind kind, const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y,
                DistanceCounter& counter) {
  if (x.size() != y.size()) throw DimensionMismatch(x.size(), y.size());
  if (is_hamming(kind) && !(is_binary(x) && is_binary(y))) throw NonBinaryInput();
  counter.charge();
  return evaluate(kind, x, y);
}

/// rho(x,y) <= rho(x,z) + rho(z,y) within 1e-9. Charges nothing.
template <typename A, typename B, typename C>
bool triangle_check(MetricKind kind, const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y,
                    const Eigen::MatrixBase<C>& z) {
  DistanceCounter scratch;
  const double xy = distance(kind, x, y, scratch);
  const double xz = distance(kind, x, z, scratch);
  const double zy = distance(kind, z, y, scratch);
  return xy <= xz + zy + 1e-9;
}

}  // namespace pivotbench
