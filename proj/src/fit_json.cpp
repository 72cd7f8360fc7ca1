#include "flr/fit_json.hpp"

#include <fstream>
#include <set>

#include "flr/errors.hpp"

namespace flr {

using nlohmann::json;

namespace {

json vector_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd vector_from(const json& j, const char* key) {
  const auto values = j.at(key).get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

}  // namespace

json filter_to_json(const FilterSpec& filter) {
  json j{{"kind", to_string(filter.kind())}, {"cn", filter.threshold()}};
  if (filter.kind() != FilterKind::truncation) j["alpha"] = filter.alpha();
  if (filter.kind() == FilterKind::generalized) {
    j["p"] = filter.power();
    j["variant"] = to_string(filter.variant());
  }
  return j;
}

FilterSpec filter_from_json(const json& j) {
  reject_unknown(j, {"kind", "cn", "alpha", "p", "variant"}, "filter");
  try {
    const auto kind = parse_filter_kind(j.at("kind").get<std::string>());
    const double cn = j.at("cn").get<double>();
    switch (kind) {
      case FilterKind::truncation:
        return FilterSpec::truncation(cn);
      case FilterKind::ridge:
        return FilterSpec::ridge(j.at("alpha").get<double>(), cn);
      case FilterKind::tikhonov:
        return FilterSpec::tikhonov(j.at("alpha").get<double>(), cn);
      case FilterKind::generalized:
        return FilterSpec::generalized(j.at("alpha").get<double>(), j.at("p").get<int>(),
                                       parse_variant(j.value("variant", std::string("A"))), cn);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad filter configuration: ") + e.what());
  }
  throw ConfigError("bad filter configuration");
}

json fit_to_json(const EstimatorFit& fit) {
  const auto& decomp = *fit.decomposition;
  const auto d = static_cast<Eigen::Index>(fit.d_n);
  json vectors = json::array();
  for (Eigen::Index j = 0; j < d; ++j) vectors.push_back(vector_json(decomp.eigenvectors.col(j)));
  return json{
      {"grid", {{"points", fit.rho_hat.grid()->points()}, {"weights", fit.rho_hat.grid()->weights()}}},
      {"rho_hat", vector_json(fit.rho_hat.values())},
      {"eigenvalues", vector_json(decomp.eigenvalues)},
      {"filtered_values", vector_json(fit.filtered_values)},
      {"eigenvectors", vectors},
      {"d_n", fit.d_n},
      {"s_hat", fit.s_hat},
      {"sigma_hat", fit.sigma_hat ? json(*fit.sigma_hat) : json(nullptr)},
      {"filter", filter_to_json(fit.filter)},
      {"n", fit.n},
      {"centered", fit.centered},
      {"mean_curve", vector_json(fit.mean_curve.values())},
      {"mean_response", fit.mean_response},
  };
}

EstimatorFit fit_from_json(const json& j) {
  try {
    reject_unknown(j,
                   {"grid", "rho_hat", "eigenvalues", "filtered_values", "eigenvectors", "d_n", "s_hat", "sigma_hat",
                    "filter", "n", "centered", "mean_curve", "mean_response"},
                   "fit");
    const auto& g = j.at("grid");
    auto grid = std::make_shared<const Grid>(g.at("points").get<std::vector<double>>(),
                                             g.at("weights").get<std::vector<double>>());
    const auto p = static_cast<Eigen::Index>(grid->size());
    const auto d_n = j.at("d_n").get<std::size_t>();
    const auto& vectors = j.at("eigenvectors");
    if (!vectors.is_array() || vectors.size() != d_n) throw ValidationError("fit has " + std::to_string(d_n) +
                                                                            " retained modes but a different number of eigenvectors");
    auto decomp = std::make_shared<SpectralDecomposition>();
    decomp->grid = grid;
    decomp->n = j.at("n").get<std::size_t>();
    decomp->eigenvalues = vector_from(j, "eigenvalues");
    decomp->eigenvectors.resize(p, static_cast<Eigen::Index>(d_n));
    for (std::size_t k = 0; k < d_n; ++k) {
      const auto col = vectors[k].get<std::vector<double>>();
      if (static_cast<Eigen::Index>(col.size()) != p) throw StructuralError("eigenvector length does not match grid");
      decomp->eigenvectors.col(static_cast<Eigen::Index>(k)) =
          Eigen::Map<const Eigen::VectorXd>(col.data(), p);
    }
    const std::vector<double> lambda(decomp->eigenvalues.data(), decomp->eigenvalues.data() + decomp->eigenvalues.size());
    decomp->gaps = spectral_gaps(lambda);

    EstimatorFit fit{
        .rho_hat = Curve(grid, vector_from(j, "rho_hat")),
        .d_n = d_n,
        .s_hat = j.at("s_hat").get<double>(),
        .sigma_hat = j.at("sigma_hat").is_null() ? std::nullopt
                                                  : std::optional<double>(j.at("sigma_hat").get<double>()),
        .n = decomp->n,
        .filter = filter_from_json(j.at("filter")),
        .decomposition = decomp,
        .filtered_values = vector_from(j, "filtered_values"),
        .centered = j.at("centered").get<bool>(),
        .mean_curve = Curve(grid, vector_from(j, "mean_curve")),
        .mean_response = j.at("mean_response").get<double>(),
    };
    if (static_cast<std::size_t>(fit.filtered_values.size()) != d_n ||
        static_cast<std::size_t>(decomp->eigenvalues.size()) < d_n)
      throw ValidationError("fit arrays are inconsistent with d_n");
    if (d_n == 0) throw ValidationError("fit has d_n = 0");
    if (fit.sigma_hat.has_value() != (fit.n > d_n)) throw ValidationError("sigma_hat presence does not match n and d_n");
    if ((fit.sigma_hat && *fit.sigma_hat < 0.0) || fit.s_hat < 0.0) throw ValidationError("fit has negative s_hat or sigma_hat");
    return fit;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed fit JSON: ") + e.what());
  }
}

EstimatorFit load_fit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open fit file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed fit JSON: ") + e.what());
  }
  return fit_from_json(j);
}

void save_fit(const EstimatorFit& fit, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write fit file: " + path);
  out << fit_to_json(fit).dump(2) << '\n';
}

}  // namespace flr
