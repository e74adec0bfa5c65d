#include "pivotbench/dataset.hpp"

#include "pivotbench/parallel.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace pivotbench {

std::string_view to_string(Generator g) {
  switch (g) {
    case Generator::Cube: return "cube";
    case Generator::Sphere: return "sphere";
    case Generator::Hamming: return "hamming";
  }
  return "unknown";
}

Generator parse_generator(std::string_view name) {
  if (name == "cube") return Generator::Cube;
  if (name == "sphere") return Generator::Sphere;
  if (name == "hamming") return Generator::Hamming;
  throw std::invalid_argument("unknown generator: " + std::string(name));
}

Dataset::Dataset(PointMatrix points, MetricKind metric, std::string label,
                 std::optional<GeneratorSpec> source)
    : points_(std::move(points)), metric_(metric), label_(std::move(label)), source_(source) {
  if (points_.rows() < 1) throw std::invalid_argument("dataset needs at least one point");
  if (points_.cols() < 1) throw std::invalid_argument("dataset dimension must be at least 1");
  if (!points_.allFinite()) throw std::invalid_argument("dataset contains non-finite coordinates");
  if (is_hamming(metric_) && !is_binary(points_)) throw NonBinaryInput();
}

void Dataset::set_metric(MetricKind metric) {
  if (is_hamming(metric) && !is_binary(points_)) throw NonBinaryInput();
  metric_ = metric;
}

Point draw_point(const GeneratorSpec& spec, StreamDomain domain, std::uint64_t index) {
  Rng rng(spec.seed, domain, index);
  Point p(spec.dim);
  switch (spec.kind) {
    case Generator::Cube:
      for (Eigen::Index c = 0; c < spec.dim; ++c) p[c] = rng.uniform();
      break;
    case Generator::Sphere: {
      double norm = 0.0;
      do {
        for (Eigen::Index c = 0; c < spec.dim; ++c) p[c] = rng.normal();
        norm = p.norm();
      } while (norm == 0.0);
      p /= norm;
      break;
    }
    case Generator::Hamming:
      for (Eigen::Index c = 0; c < spec.dim; ++c) p[c] = rng.bit() ? 1.0 : 0.0;
      break;
  }
  return p;
}

Dataset generate(Generator kind, Eigen::Index d, Eigen::Index n, Seed seed) {
  if (d < 1 || n < 1) throw std::invalid_argument("generator needs d >= 1 and n >= 1");
  if (kind == Generator::Sphere && d < 2) throw std::invalid_argument("sphere needs d >= 2");
  const GeneratorSpec spec{kind, d, seed};
  PointMatrix points(n, d);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i)
      points.row(static_cast<Eigen::Index>(i)) = draw_point(spec, StreamDomain::Points, i);
  });
  const MetricKind metric =
      kind == Generator::Hamming ? MetricKind::HammingNormalized : MetricKind::Euclidean;
  std::string label = std::string(to_string(kind)) + "-d" + std::to_string(d);
  return Dataset(std::move(points), metric, std::move(label), spec);
}

Dataset gen_uniform_cube(Eigen::Index d, Eigen::Index n, Seed seed) {
  return generate(Generator::Cube, d, n, seed);
}

Dataset gen_uniform_sphere(Eigen::Index d, Eigen::Index n, Seed seed) {
  return generate(Generator::Sphere, d, n, seed);
}

Dataset gen_hamming(Eigen::Index d, Eigen::Index n, Seed seed) {
  return generate(Generator::Hamming, d, n, seed);
}

std::string format_real(double v) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, end);
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

template <typename T>
bool parse_token(std::string_view tok, T& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

}  // namespace

Dataset load_ascii(const std::filesystem::path& path, MetricKind metric) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path.string());
  const std::string name = path.string();
  std::string line;
  std::size_t lineno = 0;
  long long n = 0, d = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '#') continue;
    auto tok = split(line);
    if (tok.size() != 2 || !parse_token(tok[0], n) || !parse_token(tok[1], d) || n < 1 || d < 1)
      throw ParseError(name, lineno, "malformed header, expected \"<n> <d>\"");
    have_header = true;
    break;
  }
  if (!have_header) throw ParseError(name, lineno, "missing header");

  PointMatrix points(n, d);
  for (long long row = 0; row < n; ++row) {
    if (!std::getline(in, line))
      throw ParseError(name, lineno + 1, "expected " + std::to_string(n) + " rows, found " +
                                             std::to_string(row));
    ++lineno;
    auto tok = split(line);
    if (static_cast<long long>(tok.size()) != d)
      throw ParseError(name, lineno, "row has " + std::to_string(tok.size()) +
                                         " values, expected " + std::to_string(d));
    for (long long c = 0; c < d; ++c) {
      double v;
      if (!parse_token(tok[c], v))
        throw ParseError(name, lineno, "non-numeric token '" + std::string(tok[c]) + "'");
      points(row, c) = v;
    }
  }
  return Dataset(std::move(points), metric, path.filename().string());
}

void write_ascii(const Dataset& ds, std::ostream& out) {
  out << ds.size() << ' ' << ds.dim() << '\n';
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    for (Eigen::Index c = 0; c < ds.dim(); ++c) {
      if (c) out << ' ';
      out << format_real(ds.points()(i, c));
    }
    out << '\n';
  }
}

void save_ascii(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path.string());
  write_ascii(ds, out);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<std::pair<double, double>> project2d(const Dataset& ds, Eigen::Index i, Eigen::Index j) {
  if (i == j) throw std::invalid_argument("projection axes must differ");
  if (i < 0 || j < 0 || i >= ds.dim() || j >= ds.dim())
    throw std::out_of_range("projection axis out of range for d=" + std::to_string(ds.dim()));
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(ds.size()));
  for (Eigen::Index r = 0; r < ds.size(); ++r) out.emplace_back(ds.points()(r, i), ds.points()(r, j));
  return out;
}

}  // namespace pivotbench
