#include "pivotbench/metric.hpp"

namespace pivotbench {

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::Euclidean: return "l2";
    case MetricKind::Chebyshev: return "linf";
    case MetricKind::HammingNormalized: return "hamming";
    case MetricKind::HammingRaw: return "hamming-raw";
    case MetricKind::Geodesic: return "geodesic";
  }
  return "unknown";
}

MetricKind parse_metric(std::string_view name) {
  if (name == "l2" || name == "euclidean") return MetricKind::Euclidean;
  if (name == "linf" || name == "chebyshev") return MetricKind::Chebyshev;
  if (name == "hamming") return MetricKind::HammingNormalized;
  if (name == "hamming-raw") return MetricKind::HammingRaw;
  if (name == "geodesic") return MetricKind::Geodesic;
  throw std::invalid_argument("unknown metric: " + std::string(name));
}

}  // namespace pivotbench
