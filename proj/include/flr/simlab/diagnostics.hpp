#pragma once

// Truth oracles and deterministic diagnostics computed from the true
// spectrum: k_n, s_n, t_n_x, truncation bias, the variance-explosion lower
// bound, identifiability partial sums and eigenvalue convexity checks.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flr/filters.hpp"
#include "flr/simlab/model.hpp"

namespace flr::simlab {

struct TrueNormalizers {
  std::size_t k_n = 0;
  double s_n = 0.0;
  std::optional<double> t_n_x;
};

// k_n from select_kn on the true eigenvalues; s_n and t_n_x summed over
// j <= k_n with the filter applied to the true eigenvalues.
TrueNormalizers true_normalizers(std::span<const double> lambdas, const FilterSpec& filter,
                                 std::optional<std::span<const double>> x_coeffs = std::nullopt);
TrueNormalizers true_normalizers(const SpectralModel& model, const FilterSpec& filter, const Curve* x = nullptr);

// t_k = sqrt(sum_{j <= k} lambda_j f(lambda_j)^2 x_j^2) for k = 1..K.
std::vector<double> t_partial_sums(std::span<const double> lambdas, std::span<const double> x_coeffs,
                                   const FilterSpec& filter);

// sqrt(sum_{l > k} lambda_l rho_l^2)
double expected_truncation_bias(std::span<const double> lambdas, std::span<const double> rho, std::size_t k);
// |sum_{l > k} rho_l x_l|
double fixed_truncation_bias(std::span<const double> rho, std::span<const double> x_coeffs, std::size_t k);
double truncation_bias(const SpectralModel& model, std::size_t k, const Curve* x = nullptr);

// sum_{l < j} lambda_l x_l^2 / (lambda_j - lambda_l)^2 (1-based j).
double variance_inner_sum(std::span<const double> lambdas, std::span<const double> x_sq, std::size_t j);

struct VarianceBoundReport {
  std::vector<std::size_t> k_grid;
  std::vector<double> lower_bound;  // sum_{j <= k} lambda_j rho_j^2 * inner(j)
  std::vector<double> inner_sums;   // inner(k)
  std::vector<double> reference;    // sum_{j <= k} j^(1 - beta) rho_j^2
  double inner_slope = 0.0;         // least-squares log-log slope of inner(k) over k_grid
};

// Throws ValidationError on repeated eigenvalues.
VarianceBoundReport variance_lower_bound(std::span<const double> lambdas, std::span<const double> x_sq,
                                         std::span<const double> rho_sq, std::span<const std::size_t> k_grid,
                                         double beta);

struct ConditionUReport {
  std::vector<double> partial_sums;  // S_J = sum_{j <= J} rho_j^2
  bool convergent = false;
};

// Identifiability partial sums sum (lambda_j rho_j)^2 / lambda_j^2. The
// convergence flag compares the increment over the last decade of terms
// with the decade before it.
ConditionUReport condition_u_diagnostic(std::span<const double> rho, std::size_t J);
ConditionUReport condition_u_diagnostic(const SpectralModel& model, std::size_t J);

struct EigenInequalityViolation {
  std::string inequality;  // "j*lambda_j >= k*lambda_k" or "tail_sum"
  std::size_t j = 0;
  std::size_t k = 0;
};

struct EigenInequalityReport {
  bool ok = true;
  std::size_t checked_pairs = 0;
  std::optional<EigenInequalityViolation> first_violation;
};

// j lambda_j >= k lambda_k for all j < k, and sum_{j >= k} lambda_j <=
// (k + 1) lambda_k for every k, over the finite sequence.
EigenInequalityReport eigen_inequality_check(std::span<const double> lambdas);

// Whether lambda_j - lambda_{j+1} <= lambda_{j-1} - lambda_j for all j >= 2.
bool is_convex_sequence(std::span<const double> lambdas);

double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace flr::simlab
