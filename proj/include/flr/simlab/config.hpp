#pragma once

// SimulationConfig JSON and report serialization (JSON summaries plus flat
// CSV rows for plotting).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "flr/filters.hpp"
#include "flr/simlab/diagnostics.hpp"
#include "flr/simlab/experiments.hpp"
#include "flr/simlab/model.hpp"

namespace flr::simlab {

// Fixed evaluation point given by its basis coefficients.
struct PointRule {
  enum class Kind { basis, power, coeffs };
  Kind kind = Kind::basis;
  std::size_t index = 1;  // basis: x = e_index
  double beta = 2.0;      // power: x_j^2 = j^(-1-beta)
  std::vector<double> values;

  std::vector<double> coefficients(std::size_t count) const;
};

struct SimulationConfig {
  ModelSpec model;
  std::optional<FilterSpec> filter;
  ThresholdRule threshold;  // "cn": real -> fixed, "cn": "auto" -> cube_root
  std::size_t n = 0;
  double level = 0.95;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  bool center = false;
  std::optional<PointRule> x;
  std::vector<std::size_t> n_grid;
  std::vector<std::size_t> k_grid;
  std::size_t J = 0;

  // Filter with c_n resolved against the model for sample size n.
  FilterSpec resolved_filter(const SpectralModel& model, std::size_t sample_size) const;
};

// Rejects unknown keys and type errors with ConfigError. `subcommand`
// selects the required keys: coverage, fixed-x, norm-divergence,
// variance-bound, condition-u.
SimulationConfig parse_simulation_config(const nlohmann::json& j, const std::string& subcommand);

nlohmann::json report_to_json(const CoverageReport& report);
void write_records_csv(std::ostream& out, const CoverageReport& report);

nlohmann::json report_to_json(const NormDivergenceReport& report);
void write_rows_csv(std::ostream& out, const NormDivergenceReport& report);

nlohmann::json report_to_json(const VarianceBoundReport& report, double alpha, double beta);
void write_rows_csv(std::ostream& out, const VarianceBoundReport& report);

nlohmann::json report_to_json(const ConditionUReport& report);
void write_rows_csv(std::ostream& out, const ConditionUReport& report);

}  // namespace flr::simlab
