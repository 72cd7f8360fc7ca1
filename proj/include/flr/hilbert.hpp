#pragma once

// Discretized L2 space: grids with quadrature weights, curves sampled on a
// grid, and the weighted inner product.

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace flr {

class Grid {
 public:
  // Throws ValidationError unless points are strictly increasing, weights
  // strictly positive, and both have the same length >= 2.
  Grid(std::vector<double> points, std::vector<double> weights);

  std::size_t size() const { return points_.size(); }
  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  double length() const { return points_.back() - points_.front(); }

  bool operator==(const Grid& other) const = default;

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const Grid>;

// Uniform grid on [a, b] with p points and trapezoid weights.
GridPtr make_trapezoid_grid(double a, double b, std::size_t p);

// Trapezoid weights for arbitrary increasing abscissae.
GridPtr make_trapezoid_grid(std::vector<double> points);

// True when both grids are the same object or hold identical points and
// weights. Curves on different grids are never resampled.
bool same_grid(const GridPtr& a, const GridPtr& b);

class Curve {
 public:
  // Throws StructuralError on length mismatch and ValidationError on
  // non-finite values.
  Curve(GridPtr grid, Eigen::VectorXd values);

  static Curve zero(GridPtr grid);

  const GridPtr& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

  Curve operator+(const Curve& other) const;
  Curve operator-(const Curve& other) const;
  Curve operator*(double scale) const;
  friend Curve operator*(double scale, const Curve& c) { return c * scale; }

 private:
  GridPtr grid_;
  Eigen::VectorXd values_;
};

// Sum of w_i * (f_i * g_i), accumulated left to right.
double inner_product(const Curve& f, const Curve& g);
double norm(const Curve& f);

// Weighted inner product on raw coordinate vectors, same summation order.
double weighted_dot(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& f,
                    const Eigen::Ref<const Eigen::VectorXd>& g);

class InnerProductSpace {
 public:
  explicit InnerProductSpace(GridPtr grid);

  const GridPtr& grid() const { return grid_; }
  double inner_product(const Curve& f, const Curve& g) const;
  double norm(const Curve& f) const;

 private:
  GridPtr grid_;
};

// n curves on one grid, stored row-wise (n x p). Used wherever the library
// takes "a list of curves".
class Sample {
 public:
  Sample(GridPtr grid, Eigen::MatrixXd rows);
  explicit Sample(std::span<const Curve> curves);

  const GridPtr& grid() const { return grid_; }
  const Eigen::MatrixXd& rows() const { return rows_; }
  std::size_t size() const { return static_cast<std::size_t>(rows_.rows()); }
  Curve curve(std::size_t i) const;

 private:
  GridPtr grid_;
  Eigen::MatrixXd rows_;
};

// Curve matrix CSV: first row holds the grid points, every following row is
// one curve. Grid weights are trapezoid weights over the given points.
Sample read_curve_matrix(std::istream& in);
Sample read_curve_matrix_file(const std::string& path);
void write_curve_matrix(std::ostream& out, const Sample& sample);

// One real per line (blank lines ignored).
std::vector<double> read_response_file(const std::string& path);

// Locale-independent shortest round-trip formatting; integral values keep a
// trailing ".0".
std::string format_real(double value);
double parse_real(std::string_view text);

}  // namespace flr
