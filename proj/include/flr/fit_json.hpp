#pragma once

#include <string>

#include "json.hpp"

#include "flr/estimator.hpp"

namespace flr {

nlohmann::json filter_to_json(const FilterSpec& filter);
// Accepts {"kind", "cn", "alpha"?, "p"?, "variant"?}; rejects unknown keys.
FilterSpec filter_from_json(const nlohmann::json& j);

// Grid, rho_hat, eigenvalues, filtered values, retained eigenvectors, d_n,
// s_hat, sigma_hat, filter, n, and the centering state.
nlohmann::json fit_to_json(const EstimatorFit& fit);
// Throws ValidationError on any missing or inconsistent field.
EstimatorFit fit_from_json(const nlohmann::json& j);

EstimatorFit load_fit(const std::string& path);
void save_fit(const EstimatorFit& fit, const std::string& path);

}  // namespace flr
