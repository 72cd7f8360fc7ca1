#pragma once

// Spectral regularization filters f_n with support [c_n, +inf), the rank
// rules k_n and d_n, and the finite-sample bias-condition report.

#include <cstddef>
#include <span>
#include <string>

#include "flr/spectral.hpp"

namespace flr {

enum class FilterKind { truncation, ridge, tikhonov, generalized };

// Two families indexed by an integer power p:
//   shifted:  x^p / (x + alpha)^(p+1)
//   powered:  x^p / (x^(p+1) + alpha)
enum class GeneralizedVariant { shifted, powered };

class FilterSpec {
 public:
  static FilterSpec truncation(double threshold);
  static FilterSpec ridge(double alpha, double threshold);
  static FilterSpec tikhonov(double alpha, double threshold);
  static FilterSpec generalized(double alpha, int power, GeneralizedVariant variant, double threshold);

  FilterKind kind() const { return kind_; }
  double threshold() const { return threshold_; }
  double alpha() const { return alpha_; }
  int power() const { return power_; }
  GeneralizedVariant variant() const { return variant_; }

  // Same filter with a different c_n.
  FilterSpec with_threshold(double threshold) const;

  // f_n(x); zero strictly below c_n. Throws ValidationError for x < 0.
  double operator()(double x) const;

  bool operator==(const FilterSpec&) const = default;

 private:
  FilterSpec(FilterKind kind, double threshold, double alpha, int power, GeneralizedVariant variant);

  FilterKind kind_ = FilterKind::truncation;
  double threshold_ = 0.0;
  double alpha_ = 0.0;
  int power_ = 0;
  GeneralizedVariant variant_ = GeneralizedVariant::shifted;
};

double filter_value(const FilterSpec& spec, double x);

std::string to_string(FilterKind kind);
FilterKind parse_filter_kind(const std::string& name);
std::string to_string(GeneralizedVariant variant);
GeneralizedVariant parse_variant(const std::string& name);

// k_n = sup{p : lambda_p + delta_p / 2 >= c_n} on a strictly decreasing
// positive sequence with c_n < lambda_1.
std::size_t select_kn(std::span<const double> eigenvalues, double threshold);

// d_n = #{j : lambda_hat_j >= c_n and lambda_hat_j > 0}. c_n = 0 keeps every
// nonzero mode.
std::size_t effective_rank(std::span<const double> eigenvalues, double threshold);
std::size_t effective_rank(const SpectralDecomposition& decomp, double threshold);

struct RankReport {
  std::size_t d_n = 0;
  std::size_t k_n = 0;
  bool has_k_n = false;
};

struct H3Report {
  double sup_deviation = 0.0;         // sup_{s in [c_n, upper]} |s f_n(s) - 1|
  bool bound_satisfied_hint = false;  // sup_deviation * sqrt(n) <= 1
};

H3Report check_h3(const FilterSpec& spec, std::size_t n, double upper);

// Whether f_n is positive and nonincreasing on [c_n, upper], sampled on a
// dense grid.
bool check_f1(const FilterSpec& spec, double upper, std::size_t samples = 10'000);

// Rule of thumb threshold: places c_n between lambda_d and lambda_{d+1}
// (geometric mean) with d = max(1, floor(n^(1/3))), so that d_n ~ n^(1/3).
// Heuristic only.
double rank_threshold(std::span<const double> eigenvalues, std::size_t target_rank);
std::size_t cube_root_rank(std::size_t n);

}  // namespace flr
