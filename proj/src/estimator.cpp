#include "flr/estimator.hpp"

#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "flr/errors.hpp"

namespace flr {

namespace {

Eigen::VectorXd weights_of(const Grid& grid) {
  return Eigen::Map<const Eigen::VectorXd>(grid.weights().data(), static_cast<Eigen::Index>(grid.size()));
}

std::size_t retained(const SpectralDecomposition& decomp, const FilterSpec& filter) {
  const std::size_t d = effective_rank(decomp, filter.threshold());
  if (d == 0) throw DegenerateError("threshold exceeds spectrum: no eigenvalue >= c_n");
  return d;
}

}  // namespace

RegularizedInverse::RegularizedInverse(std::shared_ptr<const SpectralDecomposition> decomposition, FilterSpec filter)
    : decomposition_(std::move(decomposition)), filter_(filter) {
  const std::size_t d = retained(*decomposition_, filter_);
  filtered_.resize(static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < filtered_.size(); ++j) filtered_[j] = filter_(decomposition_->eigenvalues[j]);
}

Curve RegularizedInverse::apply(const Curve& h) const {
  const Eigen::VectorXd coords = decomposition_->coordinates(h, rank());
  const auto cols = static_cast<Eigen::Index>(rank());
  return Curve(decomposition_->grid, decomposition_->eigenvectors.leftCols(cols) * filtered_.cwiseProduct(coords));
}

RegularizedInverse regularized_inverse(std::shared_ptr<const SpectralDecomposition> decomposition,
                                       const FilterSpec& filter) {
  return RegularizedInverse(std::move(decomposition), filter);
}

EstimatorFit fit(const Sample& sample, std::span<const double> responses, const FilterSpec& filter,
                 FitOptions options) {
  if (sample.size() < 2) throw ValidationError("fit needs at least 2 curves");
  const CovarianceOptions cov_options{options.center};
  const auto op = empirical_covariance(sample, cov_options);
  const auto delta = cross_covariance(sample, responses, cov_options);
  auto decomp = std::make_shared<const SpectralDecomposition>(eigendecompose(op));
  const RegularizedInverse inverse(decomp, filter);

  EstimatorFit result{
      .rho_hat = inverse.apply(delta.curve),
      .d_n = inverse.rank(),
      .s_hat = s_hat(*decomp, filter),
      .sigma_hat = std::nullopt,
      .n = sample.size(),
      .filter = filter,
      .decomposition = decomp,
      .filtered_values = inverse.filtered_values(),
      .centered = options.center,
      .mean_curve = Curve(sample.grid(), op.mean),
      .mean_response = delta.response_mean,
  };
  if (sample.size() > result.d_n) result.sigma_hat = sigma_hat(sample, responses, result);
  return result;
}

EstimatorFit fit(std::span<const Curve> sample, std::span<const double> responses, const FilterSpec& filter,
                 FitOptions options) {
  return fit(Sample(sample), responses, filter, options);
}

double predict(const EstimatorFit& fit, const Curve& x) {
  if (!fit.centered) return inner_product(fit.rho_hat, x);
  return fit.mean_response + inner_product(fit.rho_hat, x - fit.mean_curve);
}

double s_hat(const SpectralDecomposition& decomp, const FilterSpec& filter) {
  const std::size_t d = retained(decomp, filter);
  double sum = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double l = decomp.eigenvalues[static_cast<Eigen::Index>(j)];
    const double v = l * filter(l);
    sum += v * v;
  }
  return std::sqrt(sum);
}

double t_hat(const SpectralDecomposition& decomp, const FilterSpec& filter, const Curve& x) {
  const std::size_t d = retained(decomp, filter);
  const Eigen::VectorXd coords = decomp.coordinates(x, d);
  double sum = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double l = decomp.eigenvalues[jj];
    const double f = filter(l);
    sum += l * f * f * coords[jj] * coords[jj];
  }
  return std::sqrt(sum);
}

double t_hat(const EstimatorFit& fit, const Curve& x) {
  return t_hat(*fit.decomposition, fit.filter, fit.centered ? x - fit.mean_curve : x);
}

double sigma_hat(const Sample& sample, std::span<const double> responses, const EstimatorFit& fit) {
  if (!same_grid(sample.grid(), fit.rho_hat.grid())) throw StructuralError("sample and fit live on different grids");
  if (responses.size() != sample.size()) throw StructuralError("responses and curves differ in count");
  if (sample.size() <= fit.d_n) throw DegenerateError("degrees of freedom exhausted: n <= d_n");
  const Eigen::VectorXd w_rho = weights_of(*sample.grid()).cwiseProduct(fit.rho_hat.values());
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(responses.data(), static_cast<Eigen::Index>(responses.size()));
  Eigen::VectorXd fitted;
  if (fit.centered) {
    const Eigen::MatrixXd c = sample.rows().rowwise() - fit.mean_curve.values().transpose();
    fitted = (c * w_rho).array() + fit.mean_response;
  } else {
    fitted = sample.rows() * w_rho;
  }
  const double rss = (y - fitted).squaredNorm();
  return std::sqrt(rss / static_cast<double>(sample.size() - fit.d_n));
}

Normalizer parse_normalizer(const std::string& name) {
  if (name == "s_hat" || name == "s") return Normalizer::s_hat;
  if (name == "t_hat" || name == "t") return Normalizer::t_hat;
  throw ConfigError("unknown normalizer: " + name);
}

std::string to_string(Normalizer normalizer) { return normalizer == Normalizer::s_hat ? "s_hat" : "t_hat"; }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("normal quantile needs p in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

PredictionInterval prediction_interval(const EstimatorFit& fit, const Curve& x, double level, Normalizer normalizer) {
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0, 1)");
  if (!fit.sigma_hat)
    throw DegenerateError("degrees of freedom exhausted: n = " + std::to_string(fit.n) + " <= d_n = " +
                          std::to_string(fit.d_n) + ", sigma_hat undefined");
  double scale = fit.s_hat;
  if (normalizer == Normalizer::t_hat) {
    scale = t_hat(fit, x);
    // Largest attainable value for a unit-norm x, used as the zero reference.
    double reference = 0.0;
    for (Eigen::Index j = 0; j < fit.filtered_values.size(); ++j)
      reference = std::max(reference, std::sqrt(fit.decomposition->eigenvalues[j]) * fit.filtered_values[j]);
    const Curve centered = fit.centered ? x - fit.mean_curve : x;
    if (scale <= 1e-10 * reference * norm(centered))
      throw DegenerateError("t_hat vanishes: x is orthogonal to the retained eigenvectors");
  }
  const double q = normal_quantile(0.5 + level / 2.0);
  return PredictionInterval{
      .center = predict(fit, x),
      .half_width = q * *fit.sigma_hat * scale / std::sqrt(static_cast<double>(fit.n)),
      .level = level,
      .normalizer_kind = normalizer,
  };
}

}  // namespace flr
