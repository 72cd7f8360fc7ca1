#include "flr/simlab/model.hpp"

#include <cmath>
#include <numbers>

#include "flr/errors.hpp"

namespace flr::simlab {

double EigenDecay::operator()(std::size_t j) const {
  if (j == 0) throw ValidationError("eigenvalue index is 1-based");
  const double x = static_cast<double>(j);
  return kind == DecayKind::power ? std::pow(x, -1.0 - a) : std::pow(a, x);
}

std::vector<double> EigenDecay::values(std::size_t count) const {
  if (kind == DecayKind::power && !(a > 0.0)) throw ConfigError("power decay needs a > 0");
  if (kind == DecayKind::geometric && !(a > 0.0 && a < 1.0)) throw ConfigError("geometric decay needs 0 < a < 1");
  std::vector<double> out(count);
  for (std::size_t j = 0; j < count; ++j) out[j] = (*this)(j + 1);
  return out;
}

std::string to_string(XiLaw law) {
  switch (law) {
    case XiLaw::gaussian: return "gaussian";
    case XiLaw::uniform: return "uniform";
    case XiLaw::rademacher: return "rademacher";
  }
  return "unknown";
}

XiLaw parse_xi_law(const std::string& name) {
  if (name == "gaussian") return XiLaw::gaussian;
  if (name == "uniform") return XiLaw::uniform;
  if (name == "rademacher") return XiLaw::rademacher;
  throw ConfigError("unknown xi law: " + name);
}

std::vector<double> RhoRule::values(std::size_t count) const {
  std::vector<double> out(count, 0.0);
  if (kind == Kind::power) {
    for (std::size_t j = 0; j < count; ++j) out[j] = scale * std::pow(static_cast<double>(j + 1), -exponent);
  } else {
    for (std::size_t j = 0; j < count && j < coeffs.size(); ++j) out[j] = coeffs[j];
  }
  if (normalize) {
    double ss = 0.0;
    for (double v : out) ss += v * v;
    if (ss > 0.0)
      for (double& v : out) v /= std::sqrt(ss);
  }
  return out;
}

Eigen::MatrixXd cosine_basis(const Grid& grid, std::size_t count) {
  const auto p = static_cast<Eigen::Index>(grid.size());
  if (count == 0 || static_cast<Eigen::Index>(count) > p)
    throw ValidationError("basis size must lie in [1, grid points]");
  const auto& pts = grid.points();
  Eigen::MatrixXd basis(p, static_cast<Eigen::Index>(count));
  for (Eigen::Index i = 0; i < p; ++i) {
    const double t = (pts[static_cast<std::size_t>(i)] - pts.front()) / grid.length();
    basis(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < basis.cols(); ++j)
      basis(i, j) = std::numbers::sqrt2 * std::cos(static_cast<double>(j) * std::numbers::pi * t);
  }
  // Modified Gram-Schmidt, two passes.
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index j = 0; j < basis.cols(); ++j) {
      for (Eigen::Index k = 0; k < j; ++k)
        basis.col(j) -= weighted_dot(grid, basis.col(k), basis.col(j)) * basis.col(k);
      const double nrm = std::sqrt(weighted_dot(grid, basis.col(j), basis.col(j)));
      if (!(nrm > 1e-10)) throw ValidationError("cosine basis is degenerate on this grid");
      basis.col(j) /= nrm;
    }
  }
  return basis;
}

namespace {

Curve assemble(const GridPtr& grid, const Eigen::MatrixXd& basis, const std::vector<double>& coeffs) {
  const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
  return Curve(grid, basis * c);
}

}  // namespace

SpectralModel::SpectralModel(GridPtr grid, std::vector<double> lambdas, Eigen::MatrixXd basis,
                             std::vector<double> rho_coeffs, double noise_sd, XiLaw xi)
    : grid_(std::move(grid)),
      lambdas_(std::move(lambdas)),
      basis_(std::move(basis)),
      rho_coeffs_(std::move(rho_coeffs)),
      rho_(assemble(grid_, basis_, rho_coeffs_)),
      noise_sd_(noise_sd),
      xi_(xi) {
  const std::size_t L = lambdas_.size();
  if (L == 0) throw ValidationError("model needs at least one KL term");
  if (static_cast<std::size_t>(basis_.cols()) != L || rho_coeffs_.size() != L)
    throw StructuralError("model eigenvalues, basis and rho coefficients differ in size");
  for (std::size_t j = 0; j < L; ++j) {
    if (!(lambdas_[j] > 0.0)) throw ValidationError("model eigenvalues must be positive");
    if (j > 0 && !(lambdas_[j] < lambdas_[j - 1])) throw ValidationError("model eigenvalues must be strictly decreasing");
  }
  if (!(noise_sd_ >= 0.0)) throw ValidationError("noise_sd must be >= 0");
}

SpectralModel SpectralModel::build(const ModelSpec& spec) {
  auto grid = make_trapezoid_grid(0.0, 1.0, spec.grid_points);
  const std::size_t L =
      spec.truncation_level == 0 ? std::min<std::size_t>(100, spec.grid_points - 1) : spec.truncation_level;
  if (L > spec.grid_points) throw ConfigError("truncation level L exceeds the number of grid points");
  auto basis = cosine_basis(*grid, L);
  return SpectralModel(grid, spec.decay.values(L), std::move(basis), spec.rho.values(L), spec.noise_sd, spec.xi);
}

Curve SpectralModel::basis_function(std::size_t j) const {
  return Curve(grid_, basis_.col(static_cast<Eigen::Index>(j)));
}

std::vector<double> SpectralModel::coefficients(const Curve& x) const {
  if (!same_grid(grid_, x.grid())) throw StructuralError("curve is not on the model grid");
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(grid_->weights().data(), static_cast<Eigen::Index>(grid_->size()));
  const Eigen::VectorXd c = basis_.transpose() * w.cwiseProduct(x.values());
  return {c.data(), c.data() + c.size()};
}

std::vector<double> SpectralModel::cross_moment_coeffs() const {
  std::vector<double> out(lambdas_.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = lambdas_[j] * rho_coeffs_[j];
  return out;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) {
  const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(stream), hi(stream), lo(substream), hi(substream)};
  engine_.seed(seq);
}

double RandomStream::normal() { return normal_(engine_); }

double RandomStream::xi(XiLaw law) {
  switch (law) {
    case XiLaw::gaussian:
      return normal();
    case XiLaw::uniform: {
      // U(-sqrt 3, sqrt 3) has unit variance.
      std::uniform_real_distribution<double> u(-std::numbers::sqrt3, std::numbers::sqrt3);
      return u(engine_);
    }
    case XiLaw::rademacher:
      return (engine_() >> 63) ? 1.0 : -1.0;
  }
  return 0.0;
}

namespace {

Eigen::VectorXd draw_scores(const SpectralModel& model, RandomStream& rng) {
  const auto& lambdas = model.lambdas();
  Eigen::VectorXd scores(static_cast<Eigen::Index>(lambdas.size()));
  for (std::size_t l = 0; l < lambdas.size(); ++l)
    scores[static_cast<Eigen::Index>(l)] = std::sqrt(lambdas[l]) * rng.xi(model.xi_law());
  return scores;
}

}  // namespace

Curve kl_sample(const SpectralModel& model, RandomStream& rng) {
  return Curve(model.grid(), model.basis() * draw_scores(model, rng));
}

Dataset generate_dataset(const SpectralModel& model, std::size_t n, RandomStream& rng) {
  if (n == 0) throw ValidationError("dataset needs n >= 1");
  const auto L = static_cast<Eigen::Index>(model.truncation_level());
  Eigen::MatrixXd scores(static_cast<Eigen::Index>(n), L);
  std::vector<double> noise(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores.row(static_cast<Eigen::Index>(i)) = draw_scores(model, rng).transpose();
    noise[i] = model.noise_sd() * rng.normal();
  }
  Eigen::MatrixXd rows = scores * model.basis().transpose();
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(model.grid()->weights().data(), rows.cols());
  const Eigen::VectorXd w_rho = w.cwiseProduct(model.rho().values());
  const Eigen::VectorXd signal = rows * w_rho;
  std::vector<double> responses(n);
  for (std::size_t i = 0; i < n; ++i) responses[i] = signal[static_cast<Eigen::Index>(i)] + noise[i];
  return Dataset{Sample(model.grid(), std::move(rows)), std::move(responses)};
}

}  // namespace flr::simlab
