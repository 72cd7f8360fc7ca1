#include "flr/hilbert.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "flr/errors.hpp"

namespace flr {

Grid::Grid(std::vector<double> points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.size() < 2) throw ValidationError("grid needs at least 2 points");
  if (points_.size() != weights_.size())
    throw ValidationError("grid points and weights differ in length");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i]) || !std::isfinite(weights_[i]))
      throw ValidationError("grid contains non-finite values");
    if (weights_[i] <= 0.0) throw ValidationError("grid weights must be strictly positive");
    if (i > 0 && points_[i] <= points_[i - 1])
      throw ValidationError("grid points must be strictly increasing");
  }
}

GridPtr make_trapezoid_grid(double a, double b, std::size_t p) {
  if (p < 2) throw ValidationError("trapezoid grid needs p >= 2");
  if (!(a < b)) throw ValidationError("trapezoid grid needs a < b");
  const double h = (b - a) / static_cast<double>(p - 1);
  std::vector<double> points(p), weights(p, h);
  for (std::size_t i = 0; i < p; ++i) points[i] = a + h * static_cast<double>(i);
  points.back() = b;
  weights.front() = weights.back() = h / 2.0;
  return std::make_shared<const Grid>(std::move(points), std::move(weights));
}

GridPtr make_trapezoid_grid(std::vector<double> points) {
  const std::size_t p = points.size();
  if (p < 2) throw ValidationError("trapezoid grid needs p >= 2");
  std::vector<double> weights(p, 0.0);
  for (std::size_t i = 0; i + 1 < p; ++i) {
    const double half = (points[i + 1] - points[i]) / 2.0;
    weights[i] += half;
    weights[i + 1] += half;
  }
  return std::make_shared<const Grid>(std::move(points), std::move(weights));
}

bool same_grid(const GridPtr& a, const GridPtr& b) {
  if (!a || !b) return false;
  return a == b || *a == *b;
}

Curve::Curve(GridPtr grid, Eigen::VectorXd values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw StructuralError("curve without a grid");
  if (static_cast<std::size_t>(values_.size()) != grid_->size())
    throw StructuralError("curve length " + std::to_string(values_.size()) +
                          " does not match grid length " + std::to_string(grid_->size()));
  if (!values_.allFinite()) throw ValidationError("curve contains non-finite values");
}

Curve Curve::zero(GridPtr grid) {
  const auto p = static_cast<Eigen::Index>(grid->size());
  return Curve(std::move(grid), Eigen::VectorXd::Zero(p));
}

Curve Curve::operator+(const Curve& other) const {
  if (!same_grid(grid_, other.grid_)) throw StructuralError("grid mismatch");
  return Curve(grid_, values_ + other.values_);
}

Curve Curve::operator-(const Curve& other) const {
  if (!same_grid(grid_, other.grid_)) throw StructuralError("grid mismatch");
  return Curve(grid_, values_ - other.values_);
}

Curve Curve::operator*(double scale) const { return Curve(grid_, values_ * scale); }

double weighted_dot(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& f,
                    const Eigen::Ref<const Eigen::VectorXd>& g) {
  const auto& w = grid.weights();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) sum += w[static_cast<std::size_t>(i)] * (f[i] * g[i]);
  return sum;
}

double inner_product(const Curve& f, const Curve& g) {
  if (!same_grid(f.grid(), g.grid())) throw StructuralError("inner product across different grids");
  return weighted_dot(*f.grid(), f.values(), g.values());
}

double norm(const Curve& f) { return std::sqrt(inner_product(f, f)); }

InnerProductSpace::InnerProductSpace(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw StructuralError("inner product space without a grid");
}

double InnerProductSpace::inner_product(const Curve& f, const Curve& g) const {
  if (!same_grid(grid_, f.grid()) || !same_grid(grid_, g.grid()))
    throw StructuralError("curve does not live on this space's grid");
  return flr::inner_product(f, g);
}

double InnerProductSpace::norm(const Curve& f) const { return std::sqrt(inner_product(f, f)); }

Sample::Sample(GridPtr grid, Eigen::MatrixXd rows) : grid_(std::move(grid)), rows_(std::move(rows)) {
  if (!grid_) throw StructuralError("sample without a grid");
  if (rows_.rows() == 0) throw ValidationError("empty sample");
  if (static_cast<std::size_t>(rows_.cols()) != grid_->size())
    throw StructuralError("sample width does not match grid length");
  if (!rows_.allFinite()) throw ValidationError("sample contains non-finite values");
}

namespace {

Eigen::MatrixXd stack(std::span<const Curve> curves) {
  if (curves.empty()) throw ValidationError("empty sample");
  const auto& grid = curves.front().grid();
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(curves.size()), static_cast<Eigen::Index>(grid->size()));
  for (std::size_t i = 0; i < curves.size(); ++i) {
    if (!same_grid(grid, curves[i].grid())) throw StructuralError("sample curves live on different grids");
    rows.row(static_cast<Eigen::Index>(i)) = curves[i].values().transpose();
  }
  return rows;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<double> split_reals(std::string_view line, std::size_t line_no) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    const auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    try {
      out.push_back(parse_real(field));
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

Sample::Sample(std::span<const Curve> curves)
    : Sample(curves.empty() ? nullptr : curves.front().grid(), stack(curves)) {}

Curve Sample::curve(std::size_t i) const {
  return Curve(grid_, rows_.row(static_cast<Eigen::Index>(i)).transpose());
}

double parse_real(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end)
    throw ValidationError("not a real number: '" + std::string(text) + "'");
  if (!std::isfinite(value)) throw ValidationError("non-finite value: '" + std::string(text) + "'");
  return value;
}

std::string format_real(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  std::string s(buf, ptr);
  if (std::isfinite(value) && s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

Sample read_curve_matrix(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> points;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto values = split_reals(line, line_no);
    if (points.empty()) {
      points = std::move(values);
      continue;
    }
    if (values.size() != points.size())
      throw StructuralError("line " + std::to_string(line_no) + ": expected " + std::to_string(points.size()) +
                            " values, got " + std::to_string(values.size()));
    rows.push_back(std::move(values));
  }
  if (points.empty()) throw ValidationError("curve CSV has no grid row");
  if (rows.empty()) throw ValidationError("curve CSV has no curves");
  auto grid = make_trapezoid_grid(std::move(points));
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(grid->size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return Sample(std::move(grid), std::move(m));
}

Sample read_curve_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open curve file: " + path);
  return read_curve_matrix(in);
}

void write_curve_matrix(std::ostream& out, const Sample& sample) {
  const auto& pts = sample.grid()->points();
  for (std::size_t j = 0; j < pts.size(); ++j) out << (j ? "," : "") << format_real(pts[j]);
  out << '\n';
  const auto& m = sample.rows();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_real(m(i, j));
    out << '\n';
  }
}

std::vector<double> read_response_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open response file: " + path);
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      values.push_back(parse_real(line));
    } catch (const ValidationError& e) {
      throw ValidationError("responses line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return values;
}

}  // namespace flr
