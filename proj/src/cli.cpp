#include "flr/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "flr/errors.hpp"
#include "flr/estimator.hpp"
#include "flr/fit_json.hpp"
#include "flr/hilbert.hpp"
#include "flr/simlab/config.hpp"
#include "flr/simlab/diagnostics.hpp"
#include "flr/simlab/experiments.hpp"

namespace flr::cli {

namespace {

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const DegenerateError& e) {
    err << "error: degenerate: " << one_line(e.what()) << '\n';
    return kDegenerate;
  } catch (const ConfigError& e) {
    err << "error: config: " << one_line(e.what()) << '\n';
    return kValidation;
  } catch (const StructuralError& e) {
    err << "error: structural: " << one_line(e.what()) << '\n';
    return kValidation;
  } catch (const ValidationError& e) {
    err << "error: validation: " << one_line(e.what()) << '\n';
    return kValidation;
  } catch (const nlohmann::json::exception& e) {
    err << "error: validation: " << one_line(e.what()) << '\n';
    return kValidation;
  }
}

std::ofstream open_output(const std::string& path) {
  if (path.empty()) throw ValidationError("missing output path");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write output file: " + path);
  return out;
}

FilterSpec build_filter(const FitCommand& cmd, double cn) {
  switch (parse_filter_kind(cmd.filter)) {
    case FilterKind::truncation:
      return FilterSpec::truncation(cn);
    case FilterKind::ridge:
      if (!cmd.alpha) throw ConfigError("ridge filter needs --alpha");
      return FilterSpec::ridge(*cmd.alpha, cn);
    case FilterKind::tikhonov:
      if (!cmd.alpha) throw ConfigError("tikhonov filter needs --alpha");
      return FilterSpec::tikhonov(*cmd.alpha, cn);
    case FilterKind::generalized:
      if (!cmd.alpha) throw ConfigError("generalized filter needs --alpha");
      return FilterSpec::generalized(*cmd.alpha, cmd.power, parse_variant(cmd.variant), cn);
  }
  throw ConfigError("unknown filter");
}

void write_json(const std::string& path, const nlohmann::json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

template <class Writer>
void write_csv(const std::string& path, Writer&& writer) {
  auto out = open_output(csv_path_for(path));
  writer(out);
}

}  // namespace

std::string csv_path_for(const std::string& out_path) {
  const std::string ext = ".json";
  if (out_path.size() > ext.size() && out_path.compare(out_path.size() - ext.size(), ext.size(), ext) == 0)
    return out_path.substr(0, out_path.size() - ext.size()) + ".csv";
  return out_path + ".csv";
}

int cmd_fit(const FitCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (cmd.cn.empty()) throw ConfigError("missing --cn");
    if (cmd.out_path.empty()) throw ValidationError("missing --out");
    const Sample sample = read_curve_matrix_file(cmd.curves_path);
    const auto responses = read_response_file(cmd.responses_path);
    if (responses.size() != sample.size())
      throw StructuralError("got " + std::to_string(responses.size()) + " responses for " +
                            std::to_string(sample.size()) + " curves");
    double cn = 0.0;
    if (cmd.cn == "auto") {
      const auto decomp = eigendecompose(empirical_covariance(sample, CovarianceOptions{cmd.center}));
      const std::vector<double> lambda(decomp.eigenvalues.data(), decomp.eigenvalues.data() + decomp.size());
      cn = rank_threshold(lambda, std::min(cube_root_rank(sample.size()), lambda.size()));
    } else {
      cn = parse_real(cmd.cn);
    }
    const auto est = fit(sample, responses, build_filter(cmd, cn), FitOptions{cmd.center});
    save_fit(est, cmd.out_path);
    out << "d_n=" << est.d_n << " s_hat=" << format_real(est.s_hat) << " sigma_hat=" << (est.sigma_hat ? format_real(*est.sigma_hat) : "undefined")
        << '\n';
    return int{kOk};
  });
}

int cmd_predict(const PredictCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto est = load_fit(cmd.fit_path);
    const Sample xs = read_curve_matrix_file(cmd.x_path);
    if (!same_grid(xs.grid(), est.rho_hat.grid())) throw StructuralError("x curves and fit use different grids");
    const Normalizer normalizer = parse_normalizer(cmd.normalizer);
    std::ostringstream lines;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      // Rebind onto the fit's grid object so downstream checks see one grid.
      const Curve x(est.rho_hat.grid(), xs.rows().row(static_cast<Eigen::Index>(i)).transpose());
      if (!cmd.level) {
        lines << format_real(predict(est, x)) << '\n';
        continue;
      }
      const auto interval = prediction_interval(est, x, *cmd.level, normalizer);
      lines << format_real(interval.center) << ',' << format_real(interval.lower()) << ','
            << format_real(interval.upper()) << '\n';
    }
    out << lines.str();
    return int{kOk};
  });
}

int cmd_simulate(const SimulateCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::ifstream in(cmd.config_path);
    if (!in) throw ValidationError("cannot open config file: " + cmd.config_path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    auto config = simlab::parse_simulation_config(j, cmd.subcommand);
    if (cmd.seed) config.seed = *cmd.seed;
    if (cmd.out_path.empty()) throw ValidationError("missing --out");
    const simlab::ExperimentOptions options{cmd.threads, config.center};
    const std::string& sub = cmd.subcommand;

    if (sub == "coverage" || sub == "fixed-x") {
      const auto model = simlab::SpectralModel::build(config.model);
      const FilterSpec filter = config.resolved_filter(model, config.n);
      simlab::CoverageReport report;
      if (sub == "coverage") {
        report = simlab::coverage_experiment(model, config.n, filter, config.level, config.replicates, config.seed,
                                             options);
      } else {
        const auto coeffs = config.x->coefficients(model.truncation_level());
        const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
        const Curve x(model.grid(), model.basis() * c);
        report = simlab::fixed_x_experiment(model, x, config.n, filter, config.level, config.replicates, config.seed,
                                            options);
      }
      write_json(cmd.out_path, simlab::report_to_json(report));
      write_csv(cmd.out_path, [&](std::ostream& o) { simlab::write_records_csv(o, report); });
      out << "coverage=" << format_real(report.empirical_coverage) << " failures=" << report.failures << '\n';
      if (report.failures == report.replicates) {
        err << "error: all-failed: every replicate failed (" << one_line(report.records.front().failure) << ")\n";
        return int{kAllFailed};
      }
      return int{kOk};
    }
    if (sub == "norm-divergence") {
      const auto model = simlab::SpectralModel::build(config.model);
      const auto report = simlab::norm_divergence_demo(model, config.n_grid, config.threshold, *config.filter,
                                                       config.replicates, config.seed, options);
      write_json(cmd.out_path, simlab::report_to_json(report));
      write_csv(cmd.out_path, [&](std::ostream& o) { simlab::write_rows_csv(o, report); });
      out << "diverging=" << (report.diverging ? "true" : "false") << '\n';
      bool all_failed = true;
      for (const auto& row : report.rows) all_failed = all_failed && row.failures == config.replicates;
      if (all_failed) {
        err << "error: all-failed: every replicate failed\n";
        return int{kAllFailed};
      }
      return int{kOk};
    }
    if (sub == "variance-bound") {
      if (config.x->kind != simlab::PointRule::Kind::power)
        throw ConfigError("variance-bound needs x of kind \"power\"");
      std::size_t k_max = 0;
      for (auto k : config.k_grid) k_max = std::max(k_max, k);
      const auto lambdas = config.model.decay.values(k_max);
      const auto x = config.x->coefficients(k_max);
      const auto rho = config.model.rho.values(k_max);
      std::vector<double> x_sq(k_max), rho_sq(k_max);
      for (std::size_t i = 0; i < k_max; ++i) {
        x_sq[i] = x[i] * x[i];
        rho_sq[i] = rho[i] * rho[i];
      }
      const auto report = simlab::variance_lower_bound(lambdas, x_sq, rho_sq, config.k_grid, config.x->beta);
      write_json(cmd.out_path, simlab::report_to_json(report, config.model.decay.a, config.x->beta));
      write_csv(cmd.out_path, [&](std::ostream& o) { simlab::write_rows_csv(o, report); });
      out << "inner_slope=" << format_real(report.inner_slope) << '\n';
      return int{kOk};
    }
    // condition-u
    const auto rho = config.model.rho.values(config.J);
    const auto report = simlab::condition_u_diagnostic(rho, config.J);
    write_json(cmd.out_path, simlab::report_to_json(report));
    write_csv(cmd.out_path, [&](std::ostream& o) { simlab::write_rows_csv(o, report); });
    out << "convergent=" << (report.convergent ? "true" : "false") << '\n';
    return int{kOk};
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Functional linear regression with spectral regularization and CLT prediction intervals"};
  app.require_subcommand(1);

  FitCommand fit_cmd;
  auto* fit = app.add_subcommand("fit", "Fit rho_hat from a curve CSV and a response file");
  fit->add_option("--curves", fit_cmd.curves_path, "Curve matrix CSV (first row = grid)")->required();
  fit->add_option("--responses", fit_cmd.responses_path, "One response per curve row")->required();
  fit->add_option("--filter", fit_cmd.filter, "truncation | ridge | tikhonov | generalized");
  fit->add_option("--alpha", fit_cmd.alpha, "Regularization parameter for ridge/tikhonov/generalized");
  fit->add_option("--p", fit_cmd.power, "Power of the generalized filter");
  fit->add_option("--variant", fit_cmd.variant, "Generalized filter variant: A = x^p/(x+a)^(p+1), B = x^p/(x^(p+1)+a)");
  fit->add_option("--cn", fit_cmd.cn, "Threshold c_n, or 'auto' for d_n ~ floor(n^(1/3))")->required();
  fit->add_flag("--no-center{false}", fit_cmd.center, "Do not subtract the empirical means");
  fit->add_option("--out", fit_cmd.out_path, "Output fit JSON")->required();

  PredictCommand predict_cmd;
  auto* predict = app.add_subcommand("predict", "Predict at new curves, optionally with intervals");
  predict->add_option("--fit", predict_cmd.fit_path, "Fit JSON written by 'fit'")->required();
  predict->add_option("--x,--curves", predict_cmd.x_path, "Curve matrix CSV of new predictors")->required();
  predict->add_option("--level", predict_cmd.level, "Confidence level in (0, 1)");
  predict->add_option("--normalizer", predict_cmd.normalizer, "s_hat | t_hat");

  SimulateCommand sim_cmd;
  auto* simulate = app.add_subcommand("simulate", "Run a simulation experiment");
  simulate->add_option("sub", sim_cmd.subcommand, "coverage | fixed-x | norm-divergence | variance-bound | condition-u")
      ->required()
      ->check(CLI::IsMember({"coverage", "fixed-x", "norm-divergence", "variance-bound", "condition-u"}));
  simulate->add_option("--config", sim_cmd.config_path, "SimulationConfig JSON")->required();
  simulate->add_option("--out", sim_cmd.out_path, "Report JSON (a .csv companion is written next to it)")->required();
  simulate->add_option("--seed", sim_cmd.seed, "Override the config seed");
  simulate->add_option("--threads", sim_cmd.threads, "Worker threads for replicates")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << '\n';
    return kValidation;
  }
  if (fit->parsed()) return cmd_fit(fit_cmd, out, err);
  if (predict->parsed()) return cmd_predict(predict_cmd, out, err);
  return cmd_simulate(sim_cmd, out, err);
}

}  // namespace flr::cli
