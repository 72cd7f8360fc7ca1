#pragma once

// Spectrally regularized estimator rho_hat = Gamma_n^dagger Delta_n,
// prediction, the adaptive normalizers s_hat and t_hat, residual noise
// estimation, and CLT-based prediction intervals.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <span>

#include <Eigen/Dense>

#include "flr/filters.hpp"
#include "flr/hilbert.hpp"
#include "flr/spectral.hpp"

namespace flr {

// Gamma_n^dagger = sum_{j <= d_n} f_n(lambda_hat_j) e_j (x) e_j.
class RegularizedInverse {
 public:
  // Throws DegenerateError("threshold exceeds spectrum") when d_n = 0.
  RegularizedInverse(std::shared_ptr<const SpectralDecomposition> decomposition, FilterSpec filter);

  std::size_t rank() const { return static_cast<std::size_t>(filtered_.size()); }
  const Eigen::VectorXd& filtered_values() const { return filtered_; }
  const SpectralDecomposition& decomposition() const { return *decomposition_; }
  const FilterSpec& filter() const { return filter_; }

  Curve apply(const Curve& h) const;

 private:
  std::shared_ptr<const SpectralDecomposition> decomposition_;
  FilterSpec filter_;
  Eigen::VectorXd filtered_;
};

RegularizedInverse regularized_inverse(std::shared_ptr<const SpectralDecomposition> decomposition,
                                       const FilterSpec& filter);

struct FitOptions {
  bool center = true;
};

struct EstimatorFit {
  Curve rho_hat;
  std::size_t d_n = 0;
  double s_hat = 0.0;
  // Unset when n <= d_n (no residual degrees of freedom); intervals then
  // fail with DegenerateError.
  std::optional<double> sigma_hat;
  std::size_t n = 0;
  FilterSpec filter = FilterSpec::truncation(0.0);
  // Eigenvalues are complete; a fit restored from JSON only carries the
  // leading d_n eigenvector columns.
  std::shared_ptr<const SpectralDecomposition> decomposition;
  Eigen::VectorXd filtered_values;
  bool centered = false;
  Curve mean_curve;
  double mean_response = 0.0;
};

EstimatorFit fit(const Sample& sample, std::span<const double> responses, const FilterSpec& filter,
                 FitOptions options = {});
EstimatorFit fit(std::span<const Curve> sample, std::span<const double> responses, const FilterSpec& filter,
                 FitOptions options = {});

// mean_response + <rho_hat, x - mean_curve>; plain <rho_hat, x> for an
// uncentered fit.
double predict(const EstimatorFit& fit, const Curve& x);

// sqrt(sum_{j <= d_n} [lambda_j f_n(lambda_j)]^2)
double s_hat(const SpectralDecomposition& decomp, const FilterSpec& filter);

// sqrt(sum_{j <= d_n} lambda_j f_n(lambda_j)^2 <x, e_j>^2)
double t_hat(const SpectralDecomposition& decomp, const FilterSpec& filter, const Curve& x);
// Same, with x centered by the fit's mean curve.
double t_hat(const EstimatorFit& fit, const Curve& x);

// sqrt(sum_i (Y_i - Y_hat_i)^2 / (n - d_n))
double sigma_hat(const Sample& sample, std::span<const double> responses, const EstimatorFit& fit);

enum class Normalizer { s_hat, t_hat };

Normalizer parse_normalizer(const std::string& name);
std::string to_string(Normalizer normalizer);

struct PredictionInterval {
  double center = 0.0;
  double half_width = 0.0;
  double level = 0.95;
  Normalizer normalizer_kind = Normalizer::s_hat;

  double lower() const { return center - half_width; }
  double upper() const { return center + half_width; }
  bool contains(double value) const { return std::abs(value - center) <= half_width; }
};

// Standard normal quantile.
double normal_quantile(double p);
double normal_cdf(double x);

// center = predict(fit, x), half_width = q sigma_hat N / sqrt(n) with q the
// (1 + level) / 2 normal quantile and N = s_hat or t_hat(x).
PredictionInterval prediction_interval(const EstimatorFit& fit, const Curve& x, double level,
                                       Normalizer normalizer = Normalizer::s_hat);

}  // namespace flr
