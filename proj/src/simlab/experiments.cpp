#include "flr/simlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "flr/errors.hpp"
#include "flr/filters.hpp"

namespace flr::simlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream ids for the two experiment families; keeps their draws disjoint.
constexpr std::uint64_t kCoverageStream = 1;
constexpr std::uint64_t kFixedXStream = 2;
constexpr std::uint64_t kNormStream = 3;

// Rounding allowance when testing whether a degenerate (zero-width) interval
// contains its target.
bool covers(const PredictionInterval& interval, double target) {
  return std::abs(target - interval.center) <= interval.half_width + 1e-9 * (1.0 + std::abs(target));
}

double dot(std::span<const double> a, std::span<const double> b, std::size_t from, std::size_t to) {
  double s = 0.0;
  for (std::size_t l = from; l < to; ++l) s += a[l] * b[l];
  return s;
}

void aggregate(CoverageReport& report) {
  std::size_t ok = 0, hits = 0;
  double width = 0.0, normalizer = 0.0, d = 0.0, bias = 0.0, bias_abs = 0.0;
  std::vector<double> z;
  for (const auto& r : report.records) {
    if (r.failed) {
      ++report.failures;
      continue;
    }
    ++ok;
    hits += r.hit ? 1 : 0;
    width += r.half_width;
    normalizer += r.normalizer;
    d += static_cast<double>(r.d_n);
    bias += r.bias;
    bias_abs += std::abs(r.bias);
    if (std::isfinite(r.standardized_error)) z.push_back(r.standardized_error);
  }
  const double m = static_cast<double>(ok);
  report.empirical_coverage = ok ? static_cast<double>(hits) / m : kNaN;
  report.mean_half_width = ok ? width / m : kNaN;
  report.mean_normalizer = ok ? normalizer / m : kNaN;
  report.mean_d_n = ok ? d / m : kNaN;
  report.bias_mean = ok ? bias / m : kNaN;
  report.bias_mean_abs = ok ? bias_abs / m : kNaN;
  report.ks_samples = z.size();
  report.ks_statistic = z.empty() ? kNaN : ks_statistic(std::move(z));
}

void validate(std::size_t n, double level, std::size_t replicates) {
  if (n < 2) throw ValidationError("experiments need n >= 2");
  if (replicates == 0) throw ValidationError("experiments need replicates >= 1");
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("level must lie in (0, 1)");
}

std::size_t true_rank_or_zero(const SpectralModel& model, const FilterSpec& filter) {
  if (!(filter.threshold() < model.lambdas().front())) return 0;
  return select_kn(model.lambdas(), filter.threshold());
}

}  // namespace

double ks_statistic(std::vector<double> samples) {
  if (samples.empty()) throw ValidationError("KS statistic of an empty sample");
  std::sort(samples.begin(), samples.end());
  const double m = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = normal_cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  return d;
}

void for_each_replicate(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
}

CoverageReport coverage_experiment(const SpectralModel& model, std::size_t n, const FilterSpec& filter, double level,
                                   std::size_t replicates, std::uint64_t seed, ExperimentOptions options) {
  validate(n, level, replicates);
  CoverageReport report;
  report.kind = "coverage";
  report.nominal_level = level;
  report.n = n;
  report.replicates = replicates;
  report.c_n = filter.threshold();
  report.k_n = true_rank_or_zero(model, filter);
  report.seed = seed;
  report.records.resize(replicates);
  const double root_n = std::sqrt(static_cast<double>(n));
  const auto& rho = model.rho_coeffs();

  for_each_replicate(replicates, options.threads, [&](std::size_t r) {
    ReplicateRecord& rec = report.records[r];
    rec.replicate = r;
    RandomStream rng(seed, kCoverageStream, r);
    const auto data = generate_dataset(model, n, rng);
    const Curve x_new = kl_sample(model, rng);
    const auto x_coeffs = model.coefficients(x_new);
    rec.target = inner_product(model.rho(), x_new);
    rec.bias = -dot(rho, x_coeffs, report.k_n, rho.size());
    try {
      const auto est = fit(data.curves, data.responses, filter, FitOptions{options.center});
      const auto interval = prediction_interval(est, x_new, level, Normalizer::s_hat);
      rec.d_n = est.d_n;
      rec.prediction = interval.center;
      rec.half_width = interval.half_width;
      rec.normalizer = est.s_hat;
      rec.sigma_hat = *est.sigma_hat;
      rec.hit = covers(interval, rec.target);
      const double scale = rec.sigma_hat * est.s_hat;
      rec.standardized_error = scale > 0.0 ? root_n * (rec.prediction - rec.target) / scale : kNaN;
    } catch (const Error& e) {
      rec.failed = true;
      rec.failure = e.what();
    }
  });
  aggregate(report);
  return report;
}

CoverageReport fixed_x_experiment(const SpectralModel& model, const Curve& x, std::size_t n, const FilterSpec& filter,
                                  double level, std::size_t replicates, std::uint64_t seed,
                                  ExperimentOptions options) {
  validate(n, level, replicates);
  CoverageReport report;
  report.kind = "fixed-x";
  report.nominal_level = level;
  report.n = n;
  report.replicates = replicates;
  report.c_n = filter.threshold();
  report.k_n = true_rank_or_zero(model, filter);
  report.seed = seed;
  report.records.resize(replicates);

  const auto x_coeffs = model.coefficients(x);
  double sup = 0.0;
  for (std::size_t p = 0; p < x_coeffs.size(); ++p)
    sup = std::max(sup, x_coeffs[p] * x_coeffs[p] / model.lambdas()[p]);
  report.precondition_sup = sup;

  const double target = inner_product(model.rho(), x);
  const double root_n = std::sqrt(static_cast<double>(n));
  // <Pi_{k_n} rho, x> from the true eigenbasis.
  const double projected_truth = dot(model.rho_coeffs(), x_coeffs, 0, report.k_n);

  for_each_replicate(replicates, options.threads, [&](std::size_t r) {
    ReplicateRecord& rec = report.records[r];
    rec.replicate = r;
    rec.target = target;
    RandomStream rng(seed, kFixedXStream, r);
    const auto data = generate_dataset(model, n, rng);
    try {
      const auto est = fit(data.curves, data.responses, filter, FitOptions{options.center});
      const auto interval = prediction_interval(est, x, level, Normalizer::t_hat);
      rec.d_n = est.d_n;
      rec.prediction = interval.center;
      rec.half_width = interval.half_width;
      rec.normalizer = t_hat(est, x);
      rec.sigma_hat = *est.sigma_hat;
      rec.hit = covers(interval, target);
      const double scale = rec.sigma_hat * rec.normalizer;
      rec.standardized_error = scale > 0.0 ? root_n * (rec.prediction - target) / scale : kNaN;
      // <Pi_hat rho, x> over the retained empirical eigenvectors.
      const auto& decomp = *est.decomposition;
      const Eigen::VectorXd rho_scores = decomp.coordinates(model.rho(), est.d_n);
      const Eigen::VectorXd x_scores = decomp.coordinates(x, est.d_n);
      rec.bias = rho_scores.dot(x_scores) - projected_truth;
    } catch (const Error& e) {
      rec.failed = true;
      rec.failure = e.what();
    }
  });
  aggregate(report);
  return report;
}

double ThresholdRule::threshold(const SpectralModel& model, std::size_t n) const {
  if (kind == Kind::fixed) return value;
  const std::size_t d = std::min(cube_root_rank(n), model.truncation_level());
  return rank_threshold(model.lambdas(), d);
}

NormDivergenceReport norm_divergence_demo(const SpectralModel& model, std::span<const std::size_t> n_grid,
                                          const ThresholdRule& rule, const FilterSpec& filter, std::size_t replicates,
                                          std::uint64_t seed, ExperimentOptions options) {
  if (n_grid.empty()) throw ValidationError("n-grid is empty");
  if (replicates == 0) throw ValidationError("replicates must be >= 1");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1]) throw ValidationError("n-grid must be increasing");

  NormDivergenceReport report;
  report.seed = seed;
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    const std::size_t n = n_grid[g];
    const FilterSpec f = filter.with_threshold(rule.threshold(model, n));
    struct Result {
      bool ok = false;
      double d = 0.0, err = 0.0, normalized = 0.0;
    };
    std::vector<Result> results(replicates);
    for_each_replicate(replicates, options.threads, [&](std::size_t r) {
      RandomStream rng(seed, kNormStream, (static_cast<std::uint64_t>(g) << 32) | r);
      const auto data = generate_dataset(model, n, rng);
      try {
        const auto est = fit(data.curves, data.responses, f, FitOptions{options.center});
        const double err = norm(est.rho_hat - model.rho());
        results[r] = Result{true, static_cast<double>(est.d_n), err,
                            std::sqrt(static_cast<double>(n)) * err / est.s_hat};
      } catch (const Error&) {
        results[r] = Result{};
      }
    });
    NormDivergenceRow row;
    row.n = n;
    row.c_n = f.threshold();
    std::size_t ok = 0;
    for (const auto& res : results) {
      if (!res.ok) {
        ++row.failures;
        continue;
      }
      ++ok;
      row.mean_d_n += res.d;
      row.mean_error_norm += res.err;
      row.mean_normalized += res.normalized;
    }
    const double m = ok ? static_cast<double>(ok) : kNaN;
    row.mean_d_n /= m;
    row.mean_error_norm /= m;
    row.mean_normalized /= m;
    report.rows.push_back(row);
  }
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    report.ratios.push_back(report.rows[i].mean_normalized / report.rows[i - 1].mean_normalized);
  const std::size_t steps = report.ratios.size();
  report.diverging = steps >= 2 && report.ratios[steps - 1] > 1.0 && report.ratios[steps - 2] > 1.0;
  return report;
}

}  // namespace flr::simlab
