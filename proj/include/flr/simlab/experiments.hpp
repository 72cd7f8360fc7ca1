#pragma once

// Monte Carlo experiments: interval coverage for a random new predictor,
// fixed-point coverage with t_hat normalization, and the norm-topology
// divergence demonstration.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flr/estimator.hpp"
#include "flr/simlab/model.hpp"

namespace flr::simlab {

struct ExperimentOptions {
  std::size_t threads = 1;
  bool center = false;  // KL data are mean zero by construction
};

struct ReplicateRecord {
  std::size_t replicate = 0;
  bool failed = false;
  std::string failure;
  std::size_t d_n = 0;
  double prediction = 0.0;
  double target = 0.0;
  double half_width = 0.0;
  double normalizer = 0.0;  // s_hat or t_hat
  double sigma_hat = 0.0;
  double standardized_error = 0.0;  // NaN when sigma_hat = 0
  double bias = 0.0;
  bool hit = false;
};

struct CoverageReport {
  std::string kind;  // "coverage" or "fixed-x"
  double nominal_level = 0.0;
  std::size_t n = 0;
  std::size_t replicates = 0;
  std::size_t failures = 0;
  double c_n = 0.0;
  std::size_t k_n = 0;
  double empirical_coverage = 0.0;  // over successful replicates; NaN if none
  double mean_half_width = 0.0;
  double mean_normalizer = 0.0;
  double mean_d_n = 0.0;
  double ks_statistic = 0.0;  // standardized errors vs N(0, 1); NaN if none
  std::size_t ks_samples = 0;
  double bias_mean = 0.0;
  double bias_mean_abs = 0.0;
  std::optional<double> precondition_sup;  // fixed-x: max_{p <= L} x_p^2 / lambda_p
  std::uint64_t seed = 0;
  std::vector<ReplicateRecord> records;
};

// Kolmogorov-Smirnov distance between the empirical law of the samples and
// N(0, 1).
double ks_statistic(std::vector<double> samples);

// Runs body(i) for i in [0, count) on up to `threads` workers.
void for_each_replicate(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

// Each replicate: a dataset of size n and one new X, a fit, the s_hat
// interval for <rho, X_new>, and the bias component <Pi_{k_n} rho - rho, X_new>.
CoverageReport coverage_experiment(const SpectralModel& model, std::size_t n, const FilterSpec& filter, double level,
                                   std::size_t replicates, std::uint64_t seed, ExperimentOptions options = {});

// Same loop with a fixed x, t_hat normalization, target <rho, x>, and the
// random bias proxy <(Pi_hat - Pi) rho, x>. Replicates with t_hat = 0 fail.
CoverageReport fixed_x_experiment(const SpectralModel& model, const Curve& x, std::size_t n, const FilterSpec& filter,
                                  double level, std::size_t replicates, std::uint64_t seed,
                                  ExperimentOptions options = {});

// c_n either fixed or placed so the true rank is floor(n^(1/3)).
struct ThresholdRule {
  enum class Kind { fixed, cube_root };
  Kind kind = Kind::cube_root;
  double value = 0.0;

  double threshold(const SpectralModel& model, std::size_t n) const;
};

struct NormDivergenceRow {
  std::size_t n = 0;
  double c_n = 0.0;
  std::size_t failures = 0;
  double mean_d_n = 0.0;
  double mean_error_norm = 0.0;  // E ||rho_hat - rho||
  double mean_normalized = 0.0;  // E sqrt(n) ||rho_hat - rho|| / s_hat
};

struct NormDivergenceReport {
  std::vector<NormDivergenceRow> rows;
  std::vector<double> ratios;  // consecutive mean_normalized ratios
  bool diverging = false;      // ratio > 1 over the final two steps
  std::uint64_t seed = 0;
};

NormDivergenceReport norm_divergence_demo(const SpectralModel& model, std::span<const std::size_t> n_grid,
                                          const ThresholdRule& rule, const FilterSpec& filter, std::size_t replicates,
                                          std::uint64_t seed, ExperimentOptions options = {});

}  // namespace flr::simlab
