// Acceptance suite. Prints one PASS/FAIL line per criterion; with an
// argument, runs only the listed criterion numbers.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "flr/cli.hpp"
#include "flr/estimator.hpp"
#include "flr/filters.hpp"
#include "flr/simlab/diagnostics.hpp"
#include "flr/simlab/experiments.hpp"
#include "flr/simlab/model.hpp"

using namespace flr;
using namespace flr::simlab;

namespace {

constexpr std::uint64_t kSeed = 20240611;

std::size_t worker_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

// lambda_j = j^-3, rho_j proportional to j^-3 with unit norm, Gaussian
// scores, noise sd 0.5.
SpectralModel smooth_model() {
  ModelSpec spec;
  spec.decay = {DecayKind::power, 2.0};
  spec.rho.kind = RhoRule::Kind::power;
  spec.rho.exponent = 3.0;
  spec.rho.normalize = true;
  spec.noise_sd = 0.5;
  spec.xi = XiLaw::gaussian;
  return SpectralModel::build(spec);
}

FilterSpec cube_root_truncation(const SpectralModel& model, std::size_t n) {
  return FilterSpec::truncation(ThresholdRule{ThresholdRule::Kind::cube_root, 0.0}.threshold(model, n));
}

CoverageReport smooth_run(std::size_t n) {
  const auto model = smooth_model();
  return coverage_experiment(model, n, cube_root_truncation(model, n), 0.95, 1000, kSeed,
                             ExperimentOptions{worker_threads(), false});
}

Outcome criterion_1() {
  const auto r = smooth_run(100);
  const bool pass = r.failures == 0 && r.empirical_coverage >= 0.92 && r.empirical_coverage <= 0.98;
  return {pass, "coverage=" + fmt(r.empirical_coverage) + " in [0.92, 0.98], mean d_n=" + fmt(r.mean_d_n) +
                    ", failures=" + std::to_string(r.failures)};
}

double ks_critical_1pct(std::size_t m) { return 1.63 / std::sqrt(static_cast<double>(m)); }

Outcome criterion_2() {
  const auto r = smooth_run(400);
  const double crit = ks_critical_1pct(1000);
  const bool pass = r.ks_samples == 1000 && r.ks_statistic < crit;
  return {pass, "KS=" + fmt(r.ks_statistic) + " < " + fmt(crit) + " (n=400, mean d_n=" + fmt(r.mean_d_n) +
                    ", coverage=" + fmt(r.empirical_coverage) + ")"};
}

// Small random instance for the exact oracle equivalences.
struct SmallProblem {
  Sample sample;
  std::vector<double> y;
};

SmallProblem small_problem(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u(0.5, 1.5);
  std::vector<double> pts{0.0, 0.1, 0.25, 0.4, 0.55, 0.7, 0.85, 1.0};
  std::vector<double> w(pts.size());
  for (auto& v : w) v = u(gen) / 8.0;
  auto grid = std::make_shared<const Grid>(pts, w);
  Eigen::MatrixXd rows(20, 8);
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    for (Eigen::Index j = 0; j < rows.cols(); ++j) rows(i, j) = z(gen) / (1.0 + static_cast<double>(j));
  std::vector<double> y(20);
  for (auto& v : y) v = z(gen);
  return {Sample(grid, rows), y};
}

double max_rel_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

Outcome criterion_3() {
  double worst_pcr = 0.0, worst_ridge = 0.0, worst_tik = 0.0;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const auto prob = small_problem(s);
    const auto& grid = *prob.sample.grid();
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(grid.weights().data(), 8);
    const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(prob.y.data(), 20);
    const FitOptions raw{false};

    // (a) principal components regression on the leading scores
    const auto decomp = eigendecompose(empirical_covariance(prob.sample, {false}));
    const double cn = 0.5 * (decomp.eigenvalues[3] + decomp.eigenvalues[4]);
    const auto trunc = fit(prob.sample, prob.y, FilterSpec::truncation(cn), raw);
    const Eigen::MatrixXd basis = decomp.eigenvectors.leftCols(4);
    const Eigen::MatrixXd scores = prob.sample.rows() * w.asDiagonal() * basis;
    const Eigen::VectorXd beta = scores.colPivHouseholderQr().solve(yv);
    worst_pcr = std::max(worst_pcr, max_rel_diff(trunc.rho_hat.values(), basis * beta));

    // Operator matrix acting on grid values: (Gamma_n h)_i = sum_j K_ij w_j h_j.
    const Eigen::MatrixXd kernel = prob.sample.rows().transpose() * prob.sample.rows() / 20.0;
    const Eigen::MatrixXd a = kernel * w.asDiagonal();
    const Eigen::VectorXd delta = prob.sample.rows().transpose() * yv / 20.0;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(8, 8);

    // (b) ridge with c_n = 0
    const double alpha = 0.05;
    const auto ridge = fit(prob.sample, prob.y, FilterSpec::ridge(alpha, 0.0), raw);
    worst_ridge = std::max(worst_ridge, max_rel_diff(ridge.rho_hat.values(), (a + alpha * id).lu().solve(delta)));

    // (c) Tikhonov: Gamma (Gamma^2 + alpha I)^-1 Delta
    const double alpha_t = 0.01;
    const auto tik = fit(prob.sample, prob.y, FilterSpec::tikhonov(alpha_t, 0.0), raw);
    const Eigen::VectorXd tik_dense = a * (a * a + alpha_t * id).lu().solve(delta);
    worst_tik = std::max(worst_tik, max_rel_diff(tik.rho_hat.values(), tik_dense));
  }
  const bool pass = worst_pcr <= 1e-8 && worst_ridge <= 1e-8 && worst_tik <= 1e-8;
  return {pass, "max rel diff: pcr=" + fmt(worst_pcr) + " ridge=" + fmt(worst_ridge) + " tikhonov=" + fmt(worst_tik) +
                    " (tol 1e-8)"};
}

Outcome criterion_4() {
  const double cn = 0.3;
  const auto t = check_h3(FilterSpec::truncation(cn), 100, 2.0);
  const auto r = check_h3(FilterSpec::ridge(0.1, cn), 100, 2.0);
  const auto k = check_h3(FilterSpec::tikhonov(0.01, cn), 100, 2.0);
  const double dr = std::abs(r.sup_deviation - 0.1 / (cn + 0.1));
  const double dk = std::abs(k.sup_deviation - 0.01 / (cn * cn + 0.01));
  const bool pass = t.sup_deviation == 0.0 && dr <= 1e-10 && dk <= 1e-10;
  return {pass, "truncation=" + fmt(t.sup_deviation) + " ridge err=" + fmt(dr) + " tikhonov err=" + fmt(dk)};
}

Outcome criterion_5() {
  bool pass = true;
  std::string detail;
  const auto run = [&](const std::string& label, const EigenDecay& decay, std::size_t count) {
    const auto rep = eigen_inequality_check(decay.values(count));
    pass = pass && rep.ok;
    detail += label + (rep.ok ? ":ok " : ":violation[" + rep.first_violation->inequality + " at j=" +
                                             std::to_string(rep.first_violation->j) + ",k=" +
                                             std::to_string(rep.first_violation->k) + "] ");
  };
  for (double a : {0.5, 1.0, 2.0}) run("power a=" + fmt(a), {DecayKind::power, a}, 1000);
  for (double r : {0.5, 0.9}) run("geometric r=" + fmt(r), {DecayKind::geometric, r}, 60);
  return {pass, detail};
}

Outcome criterion_6() {
  const std::size_t K = 500;
  const auto lambdas = EigenDecay{DecayKind::power, 1.0}.values(K);
  const auto filter = FilterSpec::truncation(lambdas.back());
  std::vector<double> smooth(K), rough(K);
  for (std::size_t j = 0; j < K; ++j) {
    const double jj = static_cast<double>(j + 1);
    smooth[j] = std::pow(jj, -2.0);      // x_j^2 = j^-4
    rough[j] = std::sqrt(lambdas[j]);    // x_j^2 = lambda_j
  }
  // Partial sums S_k = t_{n,x}(k)^2.
  const auto square = [](std::vector<double> t) {
    for (auto& v : t) v *= v;
    return t;
  };
  const auto s_smooth = square(t_partial_sums(lambdas, smooth, filter));
  const auto s_rough = square(t_partial_sums(lambdas, rough, filter));
  const double increment = (s_smooth[K - 1] - s_smooth[K - 11]) / s_smooth[K - 11];
  const double growth = s_rough[K - 1] / s_rough[4];
  const bool pass = increment < 0.01 && growth > 10.0;
  return {pass, "bounded case: relative increment over k=490..500 " + fmt(increment) +
                    " < 0.01; unbounded case: S_500/S_5 = " + fmt(growth) + " > 10"};
}

Outcome criterion_7() {
  ModelSpec spec;
  spec.decay = {DecayKind::power, 1.0};
  spec.rho.kind = RhoRule::Kind::power;
  spec.rho.exponent = 2.0;
  spec.rho.normalize = true;
  spec.noise_sd = 0.5;
  const auto model = SpectralModel::build(spec);
  const std::vector<std::size_t> n_grid{200, 800, 3200};
  const auto rep = norm_divergence_demo(model, n_grid, ThresholdRule{ThresholdRule::Kind::cube_root, 0.0},
                                        FilterSpec::truncation(0.0), 500, kSeed,
                                        ExperimentOptions{worker_threads(), false});
  std::string detail = "normalized means:";
  for (const auto& row : rep.rows)
    detail += " n=" + std::to_string(row.n) + ":" + fmt(row.mean_normalized) + "(d=" + fmt(row.mean_d_n) + ")";
  const auto pointwise = smooth_run(400);
  const bool normal = pointwise.ks_statistic < ks_critical_1pct(1000);
  detail += "; pointwise KS=" + fmt(pointwise.ks_statistic);
  return {rep.diverging && normal, detail};
}

Outcome criterion_8() {
  const double alpha = 0.5, beta = 2.0;
  const std::size_t K = 500;
  const auto lambdas = EigenDecay{DecayKind::power, alpha}.values(K);
  std::vector<double> x_sq(K), rho_sq(K, 1.0);
  for (std::size_t j = 0; j < K; ++j) x_sq[j] = std::pow(static_cast<double>(j + 1), -1.0 - beta);
  std::vector<std::size_t> ks;
  for (std::size_t k = 50; k <= 500; ++k) ks.push_back(k);
  const auto rep = variance_lower_bound(lambdas, x_sq, rho_sq, ks, beta);
  const double target = 2.0 + alpha - beta;
  return {std::abs(rep.inner_slope - target) <= 0.15,
          "slope=" + fmt(rep.inner_slope) + " vs " + fmt(target) + " (tol 0.15)"};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome criterion_9() {
  const auto dir = std::filesystem::temp_directory_path() / ("flr_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto config = dir / "config.json";
  std::ofstream(config) << R"({"decay": {"kind": "power", "a": 2.0},
    "rho": {"kind": "power", "exponent": 3.0, "normalize": true},
    "noise_sd": 0.5, "xi": "uniform", "grid_points": 65,
    "filter": {"kind": "ridge", "alpha": 0.001, "cn": "auto"},
    "n": 150, "level": 0.9, "replicates": 60, "seed": 99})";
  std::ostringstream sink;
  std::vector<std::string> outputs;
  bool ok = true;
  for (std::size_t threads : {1, 1, 4}) {
    const auto out = dir / ("report_" + std::to_string(outputs.size()) + ".json");
    ok = ok && cli::cmd_simulate({"coverage", config.string(), out.string(), std::nullopt, threads}, sink, sink) == 0;
    outputs.push_back(slurp(out) + "\n--\n" + slurp(cli::csv_path_for(out.string())));
  }
  std::filesystem::remove_all(dir);
  const bool identical = outputs[0] == outputs[1] && outputs[1] == outputs[2];
  return {ok && identical, std::string("serial/serial/4-thread outputs ") + (identical ? "byte-identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria{
      {1, {"coverage reproduction at n=100", criterion_1}},
      {2, {"CLT normality of standardized prediction errors at n=400", criterion_2}},
      {3, {"oracle equivalences (PCR, dense ridge, dense Tikhonov)", criterion_3}},
      {4, {"filter bias sup values", criterion_4}},
      {5, {"eigenvalue inequality suite", criterion_5}},
      {6, {"t_{n,x} bounded/unbounded dichotomy", criterion_6}},
      {7, {"norm-topology divergence vs pointwise normality", criterion_7}},
      {8, {"variance-explosion inner-sum growth slope", criterion_8}},
      {9, {"determinism of simulate outputs", criterion_9}},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));
  if (selected.empty())
    for (const auto& [id, _] : criteria) selected.push_back(id);

  int failures = 0;
  for (int id : selected) {
    const auto& [name, run] = criteria.at(id);
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = run();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %d: %s -- %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(),
                secs);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
