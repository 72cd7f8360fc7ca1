#include "flr/filters.hpp"

#include <algorithm>
#include <cmath>

#include "flr/errors.hpp"

namespace flr {

FilterSpec::FilterSpec(FilterKind kind, double threshold, double alpha, int power, GeneralizedVariant variant)
    : kind_(kind), threshold_(threshold), alpha_(alpha), power_(power), variant_(variant) {
  if (!std::isfinite(threshold_) || threshold_ < 0.0) throw ConfigError("filter threshold c_n must be >= 0");
  if (kind_ != FilterKind::truncation && !(alpha_ > 0.0 && std::isfinite(alpha_)))
    throw ConfigError("filter alpha must be > 0 for " + to_string(kind_));
  if (kind_ == FilterKind::generalized && power_ < 0) throw ConfigError("generalized filter power must be >= 0");
}

FilterSpec FilterSpec::truncation(double threshold) {
  return FilterSpec(FilterKind::truncation, threshold, 0.0, 0, GeneralizedVariant::shifted);
}

FilterSpec FilterSpec::ridge(double alpha, double threshold) {
  return FilterSpec(FilterKind::ridge, threshold, alpha, 0, GeneralizedVariant::shifted);
}

FilterSpec FilterSpec::tikhonov(double alpha, double threshold) {
  return FilterSpec(FilterKind::tikhonov, threshold, alpha, 0, GeneralizedVariant::shifted);
}

FilterSpec FilterSpec::generalized(double alpha, int power, GeneralizedVariant variant, double threshold) {
  return FilterSpec(FilterKind::generalized, threshold, alpha, power, variant);
}

FilterSpec FilterSpec::with_threshold(double threshold) const {
  return FilterSpec(kind_, threshold, alpha_, power_, variant_);
}

double FilterSpec::operator()(double x) const {
  if (!(x >= 0.0)) throw ValidationError("filter argument must be >= 0");
  if (x < threshold_) return 0.0;
  switch (kind_) {
    case FilterKind::truncation:
      return x > 0.0 ? 1.0 / x : 0.0;
    case FilterKind::ridge:
      return 1.0 / (x + alpha_);
    case FilterKind::tikhonov:
      return x / (x * x + alpha_);
    case FilterKind::generalized: {
      const double xp = std::pow(x, power_);
      if (variant_ == GeneralizedVariant::shifted) return xp / std::pow(x + alpha_, power_ + 1);
      return xp / (xp * x + alpha_);
    }
  }
  return 0.0;
}

double filter_value(const FilterSpec& spec, double x) { return spec(x); }

std::string to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::truncation: return "truncation";
    case FilterKind::ridge: return "ridge";
    case FilterKind::tikhonov: return "tikhonov";
    case FilterKind::generalized: return "generalized";
  }
  return "unknown";
}

FilterKind parse_filter_kind(const std::string& name) {
  if (name == "truncation") return FilterKind::truncation;
  if (name == "ridge") return FilterKind::ridge;
  if (name == "tikhonov") return FilterKind::tikhonov;
  if (name == "generalized") return FilterKind::generalized;
  throw ConfigError("unknown filter kind: " + name);
}

std::string to_string(GeneralizedVariant variant) {
  return variant == GeneralizedVariant::shifted ? "A" : "B";
}

GeneralizedVariant parse_variant(const std::string& name) {
  if (name == "A") return GeneralizedVariant::shifted;
  if (name == "B") return GeneralizedVariant::powered;
  throw ConfigError("unknown generalized filter variant: " + name);
}

std::size_t select_kn(std::span<const double> lambda, double threshold) {
  if (lambda.empty()) throw ValidationError("select_kn needs at least one eigenvalue");
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    if (!(lambda[j] > 0.0)) throw ValidationError("true eigenvalues must be positive");
    if (j > 0 && !(lambda[j] < lambda[j - 1])) throw ValidationError("true eigenvalues must be strictly decreasing");
  }
  if (!(threshold < lambda[0])) throw ValidationError("c_n must be below lambda_1");
  const Eigen::VectorXd gaps = spectral_gaps(lambda);
  std::size_t k = 0;
  for (std::size_t j = 0; j < lambda.size(); ++j)
    if (lambda[j] + gaps[static_cast<Eigen::Index>(j)] / 2.0 >= threshold) k = j + 1;
  return k;
}

std::size_t effective_rank(std::span<const double> lambda, double threshold) {
  if (!(threshold >= 0.0)) throw ValidationError("c_n must be >= 0");
  return static_cast<std::size_t>(
      std::count_if(lambda.begin(), lambda.end(), [&](double l) { return l > 0.0 && l >= threshold; }));
}

std::size_t effective_rank(const SpectralDecomposition& decomp, double threshold) {
  return effective_rank(std::span<const double>(decomp.eigenvalues.data(), decomp.size()), threshold);
}

H3Report check_h3(const FilterSpec& spec, std::size_t n, double upper) {
  const double c = spec.threshold();
  const double a = spec.alpha();
  double sup = 0.0;
  switch (spec.kind()) {
    case FilterKind::truncation:
      sup = 0.0;
      break;
    case FilterKind::ridge:
      sup = a / (c + a);
      break;
    case FilterKind::tikhonov:
      sup = a / (c * c + a);
      break;
    case FilterKind::generalized: {
      constexpr std::size_t kPoints = 10'000;
      const double lo = std::max(c, 0.0);
      const double hi = std::max(upper, lo);
      for (std::size_t i = 0; i < kPoints; ++i) {
        const double s = i + 1 == kPoints ? hi : lo + (hi - lo) * static_cast<double>(i) / (kPoints - 1);
        if (s <= 0.0) continue;
        sup = std::max(sup, std::abs(s * spec(s) - 1.0));
      }
      break;
    }
  }
  return H3Report{sup, sup * std::sqrt(static_cast<double>(n)) <= 1.0};
}

bool check_f1(const FilterSpec& spec, double upper, std::size_t samples) {
  const double lo = spec.threshold();
  if (samples < 2 || upper < lo) return true;
  double prev = spec(lo);
  if (!(prev > 0.0)) return false;
  for (std::size_t i = 1; i < samples; ++i) {
    const double s = lo + (upper - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double v = spec(s);
    if (!(v > 0.0) || v > prev) return false;
    prev = v;
  }
  return true;
}

std::size_t cube_root_rank(std::size_t n) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::cbrt(static_cast<double>(n)) + 1e-12)));
}

double rank_threshold(std::span<const double> lambda, std::size_t target_rank) {
  if (target_rank == 0 || target_rank > lambda.size())
    throw ValidationError("target rank out of range for the supplied eigenvalues");
  const double above = lambda[target_rank - 1];
  if (!(above > 0.0)) throw DegenerateError("fewer than target-rank positive eigenvalues");
  const double below = target_rank < lambda.size() ? lambda[target_rank] : 0.0;
  return below > 0.0 ? std::sqrt(above * below) : above / 2.0;
}

}  // namespace flr
