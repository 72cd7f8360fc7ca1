#pragma once

// Empirical covariance and cross-covariance operators and their
// eigendecomposition under the grid's weighted inner product.

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "flr/hilbert.hpp"

namespace flr {

struct CovarianceOptions {
  // Subtract the empirical mean curve (and mean response) first. The
  // asymptotic theory is stated for the centered model; turn this off for
  // synthetic data that is already mean zero.
  bool center = true;
};

// Gamma_n as a kernel on the grid: K[i][j] = (1/n) sum_k X_k(t_i) X_k(t_j).
// Acting on h gives (Gamma_n h)(t_i) = sum_j w_j K[i][j] h(t_j).
struct CovarianceOperator {
  GridPtr grid;
  Eigen::MatrixXd kernel;
  std::size_t n = 0;
  bool centered = false;
  Eigen::VectorXd mean;  // zero when not centered

  Curve apply(const Curve& h) const;
};

struct CrossCovariance {
  Curve curve;  // (1/n) sum_i Y_i X_i
  double response_mean = 0.0;
};

struct SpectralDecomposition {
  GridPtr grid;
  Eigen::VectorXd eigenvalues;   // descending, clamped to >= 0
  Eigen::MatrixXd eigenvectors;  // p x p, column j is e_j sampled on the grid
  Eigen::VectorXd gaps;          // delta_j: distance to the nearest neighbour
  std::size_t n = 0;

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
  Curve eigenvector(std::size_t j) const;
  // Scores <h, e_j> for the first m eigenvectors.
  Eigen::VectorXd coordinates(const Curve& h, std::size_t m) const;
  // sum_j lambda_j <h, e_j> e_j.
  Curve reconstruct_apply(const Curve& h) const;
};

CovarianceOperator empirical_covariance(const Sample& sample, CovarianceOptions options = {});
CovarianceOperator empirical_covariance(std::span<const Curve> sample, CovarianceOptions options = {});

CrossCovariance cross_covariance(const Sample& sample, std::span<const double> responses,
                                 CovarianceOptions options = {});
CrossCovariance cross_covariance(std::span<const Curve> sample, std::span<const double> responses,
                                 CovarianceOptions options = {});

// delta_1 = l_1 - l_2, delta_j = min(l_j - l_{j+1}, l_{j-1} - l_j). The
// value after the last entry is taken as 0 (finite-rank operator).
Eigen::VectorXd spectral_gaps(std::span<const double> eigenvalues);

SpectralDecomposition eigendecompose(const CovarianceOperator& op);

}  // namespace flr
