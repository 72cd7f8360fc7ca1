#include "flr/simlab/config.hpp"

#include <cmath>
#include <ostream>
#include <set>

#include "flr/errors.hpp"
#include "flr/fit_json.hpp"
#include "flr/hilbert.hpp"

namespace flr::simlab {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

void require(const json& j, std::initializer_list<const char*> keys, const std::string& subcommand) {
  for (const char* key : keys)
    if (!j.contains(key)) throw ConfigError(subcommand + " config is missing '" + key + "'");
}

std::size_t positive_count(const json& j, const char* key) {
  const auto v = j.at(key).get<long long>();
  if (v < 1) throw ConfigError(std::string("'") + key + "' must be >= 1");
  return static_cast<std::size_t>(v);
}

std::vector<std::size_t> count_list(const json& j, const char* key) {
  if (!j.at(key).is_array() || j.at(key).empty()) throw ConfigError(std::string("'") + key + "' must be a nonempty array");
  std::vector<std::size_t> out;
  for (const auto& v : j.at(key)) {
    if (v.get<long long>() < 1) throw ConfigError(std::string("'") + key + "' entries must be >= 1");
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

EigenDecay parse_decay(const json& j) {
  reject_unknown(j, {"kind", "a"}, "decay");
  EigenDecay d;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "power") d.kind = DecayKind::power;
  else if (kind == "geometric") d.kind = DecayKind::geometric;
  else throw ConfigError("unknown decay kind: " + kind);
  d.a = j.at("a").get<double>();
  d.values(1);  // validates a
  return d;
}

RhoRule parse_rho(const json& j) {
  reject_unknown(j, {"kind", "exponent", "scale", "normalize", "coeffs"}, "rho");
  RhoRule r;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "power") {
    r.kind = RhoRule::Kind::power;
    r.exponent = j.at("exponent").get<double>();
    r.scale = j.value("scale", 1.0);
  } else if (kind == "finite") {
    r.kind = RhoRule::Kind::finite;
    r.coeffs = j.at("coeffs").get<std::vector<double>>();
  } else {
    throw ConfigError("unknown rho kind: " + kind);
  }
  r.normalize = j.value("normalize", false);
  return r;
}

PointRule parse_point(const json& j) {
  reject_unknown(j, {"kind", "index", "beta", "values"}, "x");
  PointRule p;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "basis") {
    p.kind = PointRule::Kind::basis;
    p.index = positive_count(j, "index");
  } else if (kind == "power") {
    p.kind = PointRule::Kind::power;
    p.beta = j.at("beta").get<double>();
  } else if (kind == "coeffs") {
    p.kind = PointRule::Kind::coeffs;
    p.values = j.at("values").get<std::vector<double>>();
  } else {
    throw ConfigError("unknown x kind: " + kind);
  }
  return p;
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::vector<double> PointRule::coefficients(std::size_t count) const {
  std::vector<double> out(count, 0.0);
  switch (kind) {
    case Kind::basis:
      if (index <= count) out[index - 1] = 1.0;
      break;
    case Kind::power:
      for (std::size_t j = 0; j < count; ++j) out[j] = std::pow(static_cast<double>(j + 1), -(1.0 + beta) / 2.0);
      break;
    case Kind::coeffs:
      for (std::size_t j = 0; j < count && j < values.size(); ++j) out[j] = values[j];
      break;
  }
  return out;
}

FilterSpec SimulationConfig::resolved_filter(const SpectralModel& model, std::size_t sample_size) const {
  if (!filter) throw ConfigError("config has no filter");
  return filter->with_threshold(threshold.threshold(model, sample_size));
}

SimulationConfig parse_simulation_config(const json& j, const std::string& subcommand) {
  try {
    reject_unknown(j,
                   {"decay", "rho", "noise_sd", "xi", "L", "grid_points", "filter", "n", "level", "replicates", "seed",
                    "center", "x", "n_grid", "k_grid", "J"},
                   "simulation config");
    if (subcommand == "coverage")
      require(j, {"decay", "rho", "noise_sd", "filter", "n", "level", "replicates", "seed"}, subcommand);
    else if (subcommand == "fixed-x")
      require(j, {"decay", "rho", "noise_sd", "filter", "n", "level", "replicates", "seed", "x"}, subcommand);
    else if (subcommand == "norm-divergence")
      require(j, {"decay", "rho", "noise_sd", "filter", "n_grid", "replicates", "seed"}, subcommand);
    else if (subcommand == "variance-bound")
      require(j, {"decay", "rho", "x", "k_grid"}, subcommand);
    else if (subcommand == "condition-u")
      require(j, {"rho", "J"}, subcommand);
    else
      throw ConfigError("unknown simulate subcommand: " + subcommand);

    SimulationConfig c;
    if (j.contains("decay")) c.model.decay = parse_decay(j.at("decay"));
    if (j.contains("rho")) c.model.rho = parse_rho(j.at("rho"));
    c.model.noise_sd = j.value("noise_sd", 1.0);
    if (!(c.model.noise_sd >= 0.0)) throw ConfigError("'noise_sd' must be >= 0");
    if (j.contains("xi")) c.model.xi = parse_xi_law(j.at("xi").get<std::string>());
    if (j.contains("grid_points")) {
      c.model.grid_points = positive_count(j, "grid_points");
      if (c.model.grid_points < 2) throw ConfigError("'grid_points' must be >= 2");
    }
    if (j.contains("L")) c.model.truncation_level = positive_count(j, "L");
    if (j.contains("filter")) {
      json f = j.at("filter");
      if (f.is_object() && f.contains("cn") && f.at("cn").is_string()) {
        if (f.at("cn").get<std::string>() != "auto") throw ConfigError("filter 'cn' must be a real or \"auto\"");
        c.threshold.kind = ThresholdRule::Kind::cube_root;
        f["cn"] = 0.0;
        c.filter = filter_from_json(f);
      } else {
        c.filter = filter_from_json(f);
        c.threshold.kind = ThresholdRule::Kind::fixed;
        c.threshold.value = c.filter->threshold();
      }
    }
    if (j.contains("n")) {
      c.n = positive_count(j, "n");
      if (c.n < 2) throw ConfigError("'n' must be >= 2");
    }
    c.level = j.value("level", 0.95);
    if (!(c.level > 0.0 && c.level < 1.0)) throw ConfigError("'level' must lie in (0, 1)");
    if (j.contains("replicates")) c.replicates = positive_count(j, "replicates");
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    c.center = j.value("center", false);
    if (j.contains("x")) c.x = parse_point(j.at("x"));
    if (j.contains("n_grid")) c.n_grid = count_list(j, "n_grid");
    if (j.contains("k_grid")) c.k_grid = count_list(j, "k_grid");
    if (j.contains("J")) c.J = positive_count(j, "J");
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad simulation config: ") + e.what());
  }
}

json report_to_json(const CoverageReport& r) {
  json j{
      {"kind", r.kind},
      {"nominal_level", r.nominal_level},
      {"n", r.n},
      {"replicates", r.replicates},
      {"failures", r.failures},
      {"c_n", r.c_n},
      {"k_n", r.k_n},
      {"empirical_coverage", nullable(r.empirical_coverage)},
      {"mean_half_width", nullable(r.mean_half_width)},
      {"mean_normalizer", nullable(r.mean_normalizer)},
      {"mean_d_n", nullable(r.mean_d_n)},
      {"ks_statistic", nullable(r.ks_statistic)},
      {"ks_samples", r.ks_samples},
      {"bias_summary", {{"mean", nullable(r.bias_mean)}, {"mean_abs", nullable(r.bias_mean_abs)}}},
      {"seed", r.seed},
  };
  if (r.precondition_sup) j["precondition_sup"] = *r.precondition_sup;
  return j;
}

void write_records_csv(std::ostream& out, const CoverageReport& r) {
  out << "replicate,failed,d_n,prediction,target,half_width,normalizer,sigma_hat,standardized_error,bias,hit\n";
  for (const auto& rec : r.records) {
    out << rec.replicate << ',' << (rec.failed ? 1 : 0) << ',' << rec.d_n << ',' << format_real(rec.prediction) << ','
        << format_real(rec.target) << ',' << format_real(rec.half_width) << ',' << format_real(rec.normalizer) << ','
        << format_real(rec.sigma_hat) << ',' << format_real(rec.standardized_error) << ',' << format_real(rec.bias)
        << ',' << (rec.hit ? 1 : 0) << '\n';
  }
}

json report_to_json(const NormDivergenceReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"n", row.n},
                    {"c_n", row.c_n},
                    {"failures", row.failures},
                    {"mean_d_n", nullable(row.mean_d_n)},
                    {"mean_error_norm", nullable(row.mean_error_norm)},
                    {"mean_normalized", nullable(row.mean_normalized)}});
  json ratios = json::array();
  for (double v : r.ratios) ratios.push_back(nullable(v));
  return json{{"kind", "norm-divergence"}, {"rows", rows}, {"ratios", ratios}, {"diverging", r.diverging}, {"seed", r.seed}};
}

void write_rows_csv(std::ostream& out, const NormDivergenceReport& r) {
  out << "n,c_n,failures,mean_d_n,mean_error_norm,mean_normalized\n";
  for (const auto& row : r.rows)
    out << row.n << ',' << format_real(row.c_n) << ',' << row.failures << ',' << format_real(row.mean_d_n) << ','
        << format_real(row.mean_error_norm) << ',' << format_real(row.mean_normalized) << '\n';
}

json report_to_json(const VarianceBoundReport& r, double alpha, double beta) {
  return json{{"kind", "variance-bound"},
              {"k_grid", r.k_grid},
              {"lower_bound", r.lower_bound},
              {"inner_sums", r.inner_sums},
              {"reference", r.reference},
              {"inner_slope", nullable(r.inner_slope)},
              {"predicted_slope", 2.0 + alpha - beta}};
}

void write_rows_csv(std::ostream& out, const VarianceBoundReport& r) {
  out << "k,lower_bound,inner_sum,reference\n";
  for (std::size_t i = 0; i < r.k_grid.size(); ++i)
    out << r.k_grid[i] << ',' << format_real(r.lower_bound[i]) << ',' << format_real(r.inner_sums[i]) << ','
        << format_real(r.reference[i]) << '\n';
}

json report_to_json(const ConditionUReport& r) {
  return json{{"kind", "condition-u"},
              {"J", r.partial_sums.size()},
              {"final_partial_sum", r.partial_sums.empty() ? 0.0 : r.partial_sums.back()},
              {"convergent", r.convergent}};
}

void write_rows_csv(std::ostream& out, const ConditionUReport& r) {
  out << "J,partial_sum\n";
  for (std::size_t i = 0; i < r.partial_sums.size(); ++i) out << i + 1 << ',' << format_real(r.partial_sums[i]) << '\n';
}

}  // namespace flr::simlab
