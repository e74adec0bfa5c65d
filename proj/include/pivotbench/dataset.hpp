#pragma once

#include "pivotbench/metric.hpp"
#include "pivotbench/rng.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pivotbench {

enum class Generator { Cube, Sphere, Hamming };

std::string_view to_string(Generator g);
Generator parse_generator(std::string_view name);

/// Distribution a dataset was sampled from. Queries can be drawn fresh from
/// the same distribution (q in the ambient space, not in X).
struct GeneratorSpec {
  Generator kind = Generator::Cube;
  Eigen::Index dim = 1;
  Seed seed{};
};

/// n points of dimension d with an attached metric.
class Dataset {
 public:
  Dataset(PointMatrix points, MetricKind metric, std::string label = {},
          std::optional<GeneratorSpec> source = std::nullopt);

  Eigen::Index size() const { return points_.rows(); }
  Eigen::Index dim() const { return points_.cols(); }

  auto point(Eigen::Index i) const { return points_.row(i); }
  const PointMatrix& points() const { return points_; }

  MetricKind metric() const { return metric_; }
  /// Switches the metric; validates binarity when switching to a Hamming kind.
  void set_metric(MetricKind metric);

  const std::string& label() const { return label_; }
  const std::optional<GeneratorSpec>& source() const { return source_; }

  /// Validates a query center against this dataset's dimension and metric.
  template <typename Derived>
  void check_center(const Eigen::MatrixBase<Derived>& q) const {
    if (q.size() != dim()) throw DimensionMismatch(q.size(), dim());
    if (is_hamming(metric_) && !is_binary(q)) throw NonBinaryInput();
  }

  bool operator==(const Dataset& other) const {
    return metric_ == other.metric_ && points_.rows() == other.points_.rows() &&
           points_.cols() == other.points_.cols() && points_ == other.points_;
  }

 private:
  PointMatrix points_;
  MetricKind metric_;
  std::string label_;
  std::optional<GeneratorSpec> source_;
};

/// One point of the generator's distribution, from stream (seed, domain, index).
Point draw_point(const GeneratorSpec& spec, StreamDomain domain, std::uint64_t index);

/// Coordinates i.i.d. uniform on [0,1]; Euclidean metric.
Dataset gen_uniform_cube(Eigen::Index d, Eigen::Index n, Seed seed);
/// Uniform on the unit sphere in R^d (normalized Gaussian); Euclidean metric.
Dataset gen_uniform_sphere(Eigen::Index d, Eigen::Index n, Seed seed);
/// Fair-coin binary coordinates; normalized Hamming metric.
Dataset gen_hamming(Eigen::Index d, Eigen::Index n, Seed seed);
Dataset generate(Generator kind, Eigen::Index d, Eigen::Index n, Seed seed);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// ASCII dataset format: optional '#' comment lines, a header "n d", then n
/// rows of d reals separated by single spaces. Reals use 17 significant digits.
Dataset load_ascii(const std::filesystem::path& path, MetricKind metric = MetricKind::Euclidean);
void save_ascii(const Dataset& ds, const std::filesystem::path& path);
void write_ascii(const Dataset& ds, std::ostream& out);

/// (x_i, x_j) for every point, in dataset order.
std::vector<std::pair<double, double>> project2d(const Dataset& ds, Eigen::Index i, Eigen::Index j);

/// Locale-independent 17-significant-digit formatting shared by every writer.
std::string format_real(double v);

}  // namespace pivotbench
