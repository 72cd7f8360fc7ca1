#include "flr/simlab/diagnostics.hpp"

#include <cmath>

#include "flr/errors.hpp"

namespace flr::simlab {

TrueNormalizers true_normalizers(std::span<const double> lambdas, const FilterSpec& filter,
                                 std::optional<std::span<const double>> x_coeffs) {
  TrueNormalizers out;
  out.k_n = select_kn(lambdas, filter.threshold());
  // k_n already marks the cut, and lambda_{k_n} itself may sit just below
  // c_n, so the filter is evaluated without its support indicator.
  const FilterSpec shape = filter.with_threshold(0.0);
  double s = 0.0, t = 0.0;
  for (std::size_t j = 0; j < out.k_n; ++j) {
    const double f = shape(lambdas[j]);
    s += (lambdas[j] * f) * (lambdas[j] * f);
    if (x_coeffs) {
      const double xj = j < x_coeffs->size() ? (*x_coeffs)[j] : 0.0;
      t += lambdas[j] * f * f * xj * xj;
    }
  }
  out.s_n = std::sqrt(s);
  if (x_coeffs) out.t_n_x = std::sqrt(t);
  return out;
}

TrueNormalizers true_normalizers(const SpectralModel& model, const FilterSpec& filter, const Curve* x) {
  if (!x) return true_normalizers(model.lambdas(), filter);
  const auto coeffs = model.coefficients(*x);
  return true_normalizers(model.lambdas(), filter, std::span<const double>(coeffs));
}

std::vector<double> t_partial_sums(std::span<const double> lambdas, std::span<const double> x_coeffs,
                                   const FilterSpec& filter) {
  if (x_coeffs.size() < lambdas.size()) throw StructuralError("need one x coefficient per eigenvalue");
  std::vector<double> out(lambdas.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    const double f = filter(lambdas[j]);
    sum += lambdas[j] * f * f * x_coeffs[j] * x_coeffs[j];
    out[j] = std::sqrt(sum);
  }
  return out;
}

double expected_truncation_bias(std::span<const double> lambdas, std::span<const double> rho, std::size_t k) {
  if (rho.size() < lambdas.size()) throw StructuralError("need one rho coefficient per eigenvalue");
  double sum = 0.0;
  for (std::size_t l = k; l < lambdas.size(); ++l) sum += lambdas[l] * rho[l] * rho[l];
  return std::sqrt(sum);
}

double fixed_truncation_bias(std::span<const double> rho, std::span<const double> x_coeffs, std::size_t k) {
  double sum = 0.0;
  for (std::size_t l = k; l < rho.size() && l < x_coeffs.size(); ++l) sum += rho[l] * x_coeffs[l];
  return std::abs(sum);
}

double truncation_bias(const SpectralModel& model, std::size_t k, const Curve* x) {
  if (!x) return expected_truncation_bias(model.lambdas(), model.rho_coeffs(), k);
  const auto coeffs = model.coefficients(*x);
  return fixed_truncation_bias(model.rho_coeffs(), coeffs, k);
}

double variance_inner_sum(std::span<const double> lambdas, std::span<const double> x_sq, std::size_t j) {
  if (j == 0 || j > lambdas.size() || x_sq.size() < j) throw ValidationError("inner sum index out of range");
  double sum = 0.0;
  const double lj = lambdas[j - 1];
  for (std::size_t l = 0; l + 1 < j; ++l) {
    const double diff = lj - lambdas[l];
    if (diff == 0.0) throw ValidationError("repeated eigenvalues: lambda_" + std::to_string(l + 1) +
                                           " == lambda_" + std::to_string(j));
    sum += lambdas[l] * x_sq[l] / (diff * diff);
  }
  return sum;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("slope fit needs at least two matching points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

VarianceBoundReport variance_lower_bound(std::span<const double> lambdas, std::span<const double> x_sq,
                                         std::span<const double> rho_sq, std::span<const std::size_t> k_grid,
                                         double beta) {
  if (k_grid.empty()) throw ValidationError("k-grid is empty");
  std::size_t k_max = 0;
  for (auto k : k_grid) k_max = std::max(k_max, k);
  if (k_max > lambdas.size() || k_max > x_sq.size() || k_max > rho_sq.size())
    throw StructuralError("k-grid exceeds the supplied sequences");
  for (std::size_t j = 1; j < k_max; ++j)
    if (lambdas[j] == lambdas[j - 1]) throw ValidationError("repeated eigenvalues at index " + std::to_string(j + 1));

  // cumulative sums over j = 1..k_max
  std::vector<double> inner(k_max), bound(k_max), reference(k_max);
  double acc = 0.0, ref = 0.0;
  for (std::size_t j = 1; j <= k_max; ++j) {
    inner[j - 1] = variance_inner_sum(lambdas, x_sq, j);
    acc += lambdas[j - 1] * rho_sq[j - 1] * inner[j - 1];
    ref += std::pow(static_cast<double>(j), 1.0 - beta) * rho_sq[j - 1];
    bound[j - 1] = acc;
    reference[j - 1] = ref;
  }

  VarianceBoundReport report;
  report.k_grid.assign(k_grid.begin(), k_grid.end());
  std::vector<double> ks, positive_inner;
  for (auto k : k_grid) {
    if (k == 0) throw ValidationError("k-grid entries must be >= 1");
    report.lower_bound.push_back(bound[k - 1]);
    report.inner_sums.push_back(inner[k - 1]);
    report.reference.push_back(reference[k - 1]);
    if (inner[k - 1] > 0.0) {
      ks.push_back(static_cast<double>(k));
      positive_inner.push_back(inner[k - 1]);
    }
  }
  report.inner_slope = ks.size() >= 2 ? loglog_slope(ks, positive_inner) : std::nan("");
  return report;
}

ConditionUReport condition_u_diagnostic(std::span<const double> rho, std::size_t J) {
  if (J == 0 || J > rho.size()) throw ValidationError("J must lie in [1, number of coefficients]");
  ConditionUReport report;
  report.partial_sums.resize(J);
  double sum = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    sum += rho[j] * rho[j];
    report.partial_sums[j] = sum;
  }
  const auto at = [&](std::size_t k) { return k == 0 ? 0.0 : report.partial_sums[k - 1]; };
  const double total = at(J);
  if (total == 0.0) {
    report.convergent = true;
    return report;
  }
  if (J >= 100) {
    const double last = at(J) - at(J / 10);
    const double previous = at(J / 10) - at(J / 100);
    report.convergent = last <= 0.5 * previous || last <= 1e-12 * total;
  } else {
    // Too short for decades: look at the increment over the final tenth.
    const double last = at(J) - at(J - std::max<std::size_t>(1, J / 10));
    report.convergent = last <= 1e-3 * total;
  }
  return report;
}

ConditionUReport condition_u_diagnostic(const SpectralModel& model, std::size_t J) {
  // (lambda_j rho_j)^2 / lambda_j^2 is rho_j^2 for every model coefficient.
  const auto cross = model.cross_moment_coeffs();
  std::vector<double> ratio(cross.size());
  for (std::size_t j = 0; j < cross.size(); ++j) ratio[j] = cross[j] / model.lambdas()[j];
  return condition_u_diagnostic(ratio, J);
}

EigenInequalityReport eigen_inequality_check(std::span<const double> lambdas) {
  EigenInequalityReport report;
  const std::size_t m = lambdas.size();
  // The tail sum of a finite sequence is taken over the supplied terms.
  std::vector<double> tail(m + 1, 0.0);
  for (std::size_t k = m; k-- > 0;) tail[k] = tail[k + 1] + lambdas[k];

  const auto flag = [&](std::string which, std::size_t j, std::size_t k) {
    if (report.ok) {
      report.ok = false;
      report.first_violation = EigenInequalityViolation{std::move(which), j, k};
    }
  };
  for (std::size_t k = 1; k <= m; ++k) {
    const double k_lk = static_cast<double>(k) * lambdas[k - 1];
    for (std::size_t j = 1; j < k; ++j) {
      ++report.checked_pairs;
      if (static_cast<double>(j) * lambdas[j - 1] < k_lk) flag("j*lambda_j >= k*lambda_k", j, k);
    }
    ++report.checked_pairs;
    if (tail[k - 1] > static_cast<double>(k + 1) * lambdas[k - 1] * (1.0 + 1e-12)) flag("tail_sum", k, k);
  }
  return report;
}

bool is_convex_sequence(std::span<const double> lambdas) {
  for (std::size_t j = 1; j + 1 < lambdas.size(); ++j)
    if (lambdas[j] - lambdas[j + 1] > lambdas[j - 1] - lambdas[j]) return false;
  return true;
}

}  // namespace flr::simlab
