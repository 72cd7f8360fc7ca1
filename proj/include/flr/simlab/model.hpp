#pragma once

// Ground-truth spectral models and Karhunen-Loeve data generation.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "flr/hilbert.hpp"

namespace flr::simlab {

enum class DecayKind { power, geometric };

// power:     lambda_j = j^(-1-a), a > 0
// geometric: lambda_j = a^j,      0 < a < 1
struct EigenDecay {
  DecayKind kind = DecayKind::power;
  double a = 1.0;

  double operator()(std::size_t j) const;  // j is 1-based
  std::vector<double> values(std::size_t count) const;
};

enum class XiLaw { gaussian, uniform, rademacher };

std::string to_string(XiLaw law);
XiLaw parse_xi_law(const std::string& name);

// Coefficients rho_j = <rho, e_j>.
struct RhoRule {
  enum class Kind { power, finite };
  Kind kind = Kind::power;
  double exponent = 2.0;  // power: rho_j = scale * j^(-exponent)
  double scale = 1.0;
  bool normalize = false;  // rescale the first L coefficients to unit norm
  std::vector<double> coeffs;  // finite: explicit leading coefficients

  std::vector<double> values(std::size_t count) const;
};

struct ModelSpec {
  EigenDecay decay;
  RhoRule rho;
  double noise_sd = 1.0;
  XiLaw xi = XiLaw::gaussian;
  std::size_t grid_points = 101;
  std::size_t truncation_level = 0;  // 0 selects min(100, grid_points - 1)
};

// e_1 = 1, e_j = sqrt(2) cos((j - 1) pi t) on the grid mapped to [0, 1],
// then Gram-Schmidt under the quadrature product so the columns are exactly
// orthonormal.
Eigen::MatrixXd cosine_basis(const Grid& grid, std::size_t count);

class SpectralModel {
 public:
  SpectralModel(GridPtr grid, std::vector<double> lambdas, Eigen::MatrixXd basis, std::vector<double> rho_coeffs,
                double noise_sd, XiLaw xi);

  static SpectralModel build(const ModelSpec& spec);

  const GridPtr& grid() const { return grid_; }
  std::size_t truncation_level() const { return lambdas_.size(); }
  const std::vector<double>& lambdas() const { return lambdas_; }
  const Eigen::MatrixXd& basis() const { return basis_; }
  Curve basis_function(std::size_t j) const;  // 0-based
  const std::vector<double>& rho_coeffs() const { return rho_coeffs_; }
  const Curve& rho() const { return rho_; }
  double noise_sd() const { return noise_sd_; }
  XiLaw xi_law() const { return xi_; }

  // <x, e_j> for j = 1..L.
  std::vector<double> coefficients(const Curve& x) const;
  // <E(XY), e_j> = lambda_j rho_j.
  std::vector<double> cross_moment_coeffs() const;

 private:
  GridPtr grid_;
  std::vector<double> lambdas_;
  Eigen::MatrixXd basis_;
  std::vector<double> rho_coeffs_;
  Curve rho_;
  double noise_sd_;
  XiLaw xi_;
};

// Random stream keyed by (seed, stream, substream). Every replicate draws
// from its own stream, so results do not depend on scheduling.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0);

  double normal();
  double xi(XiLaw law);
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// X = sum_{l <= L} sqrt(lambda_l) xi_l e_l.
Curve kl_sample(const SpectralModel& model, RandomStream& rng);

struct Dataset {
  Sample curves;
  std::vector<double> responses;
};

// n i.i.d. pairs Y = <rho, X> + eps with eps ~ N(0, noise_sd^2).
Dataset generate_dataset(const SpectralModel& model, std::size_t n, RandomStream& rng);

}  // namespace flr::simlab
