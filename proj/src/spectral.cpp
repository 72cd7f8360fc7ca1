#include "flr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "flr/errors.hpp"

namespace flr {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kClampRelative = 1e-12;

Eigen::VectorXd weight_vector(const Grid& grid) {
  return Eigen::Map<const Eigen::VectorXd>(grid.weights().data(), static_cast<Eigen::Index>(grid.size()));
}

}  // namespace

Curve CovarianceOperator::apply(const Curve& h) const {
  if (!same_grid(grid, h.grid())) throw StructuralError("covariance operator applied across grids");
  const Eigen::VectorXd wh = weight_vector(*grid).cwiseProduct(h.values());
  return Curve(grid, kernel * wh);
}

Curve SpectralDecomposition::eigenvector(std::size_t j) const {
  return Curve(grid, eigenvectors.col(static_cast<Eigen::Index>(j)));
}

Eigen::VectorXd SpectralDecomposition::coordinates(const Curve& h, std::size_t m) const {
  if (!same_grid(grid, h.grid())) throw StructuralError("projection across grids");
  const auto cols = static_cast<Eigen::Index>(m);
  const Eigen::VectorXd wh = weight_vector(*grid).cwiseProduct(h.values());
  return eigenvectors.leftCols(cols).transpose() * wh;
}

Curve SpectralDecomposition::reconstruct_apply(const Curve& h) const {
  const Eigen::VectorXd coords = coordinates(h, size());
  return Curve(grid, eigenvectors * eigenvalues.cwiseProduct(coords));
}

CovarianceOperator empirical_covariance(const Sample& sample, CovarianceOptions options) {
  const auto n = static_cast<double>(sample.size());
  CovarianceOperator op;
  op.grid = sample.grid();
  op.n = sample.size();
  op.centered = options.center;
  if (options.center) {
    op.mean = sample.rows().colwise().mean().transpose();
    const Eigen::MatrixXd c = sample.rows().rowwise() - op.mean.transpose();
    op.kernel = c.transpose() * c / n;
  } else {
    op.mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(op.grid->size()));
    op.kernel = sample.rows().transpose() * sample.rows() / n;
  }
  // symmetrize away rounding from the product
  op.kernel = (0.5 * (op.kernel + op.kernel.transpose())).eval();
  return op;
}

CovarianceOperator empirical_covariance(std::span<const Curve> sample, CovarianceOptions options) {
  return empirical_covariance(Sample(sample), options);
}

CrossCovariance cross_covariance(const Sample& sample, std::span<const double> responses, CovarianceOptions options) {
  if (responses.size() != sample.size())
    throw StructuralError("got " + std::to_string(responses.size()) + " responses for " +
                          std::to_string(sample.size()) + " curves");
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(responses.data(), static_cast<Eigen::Index>(responses.size()));
  if (!y.allFinite()) throw ValidationError("responses contain non-finite values");
  const auto n = static_cast<double>(sample.size());
  double y_mean = 0.0;
  Eigen::VectorXd delta;
  if (options.center) {
    y_mean = y.mean();
    const Eigen::RowVectorXd x_mean = sample.rows().colwise().mean();
    const Eigen::MatrixXd c = sample.rows().rowwise() - x_mean;
    delta = c.transpose() * (y.array() - y_mean).matrix() / n;
  } else {
    delta = sample.rows().transpose() * y / n;
  }
  return CrossCovariance{Curve(sample.grid(), std::move(delta)), y_mean};
}

CrossCovariance cross_covariance(std::span<const Curve> sample, std::span<const double> responses,
                                 CovarianceOptions options) {
  return cross_covariance(Sample(sample), responses, options);
}

Eigen::VectorXd spectral_gaps(std::span<const double> lambda) {
  const std::size_t m = lambda.size();
  Eigen::VectorXd gaps(static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    const double next = j + 1 < m ? lambda[j + 1] : 0.0;
    double gap = lambda[j] - next;
    if (j > 0) gap = std::min(gap, lambda[j - 1] - lambda[j]);
    gaps[static_cast<Eigen::Index>(j)] = gap;
  }
  return gaps;
}

SpectralDecomposition eigendecompose(const CovarianceOperator& op) {
  const Eigen::MatrixXd& k = op.kernel;
  if (k.rows() != k.cols() || static_cast<std::size_t>(k.rows()) != op.grid->size())
    throw StructuralError("kernel shape does not match grid");
  const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
  if ((k - k.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale)
    throw ValidationError("covariance kernel is not symmetric");

  // S = W^{1/2} K W^{1/2} is symmetric and similar to the weighted operator.
  const Eigen::VectorXd sqrt_w = weight_vector(*op.grid).cwiseSqrt();
  const Eigen::MatrixXd s = sqrt_w.asDiagonal() * k * sqrt_w.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  if (solver.info() != Eigen::Success) throw DegenerateError("eigensolver failed to converge");

  const Eigen::Index p = s.rows();
  SpectralDecomposition d;
  d.grid = op.grid;
  d.n = op.n;
  d.eigenvalues = solver.eigenvalues().reverse();
  d.eigenvectors = sqrt_w.cwiseInverse().asDiagonal() * solver.eigenvectors().rowwise().reverse();

  const double top = std::max(d.eigenvalues[0], 0.0);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (d.eigenvalues[j] < kClampRelative * top || top == 0.0) d.eigenvalues[j] = 0.0;

    auto col = d.eigenvectors.col(j);
    col /= std::sqrt(weighted_dot(*op.grid, col, col));
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < p; ++i)
      if (std::abs(col[i]) > std::abs(col[arg])) arg = i;
    if (col[arg] < 0.0) col = -col;
  }
  const std::vector<double> lambda(d.eigenvalues.data(), d.eigenvalues.data() + p);
  d.gaps = spectral_gaps(lambda);
  return d;
}

}  // namespace flr
