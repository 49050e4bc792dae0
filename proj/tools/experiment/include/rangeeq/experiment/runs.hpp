#pragma once

#include <json.hpp>

#include "rangeeq/experiment/scenario.hpp"
#include "rangeeq/experiment/table.hpp"

namespace rangeeq::experiment {

/// Coefficients, clearing residuals and, at the scenario's fixed state,
/// prices and demands.
nlohmann::json run_equilibrium(const Scenario& s);

/// Columns sweep_value, price_baseline, price_range, sens_baseline,
/// sens_range. Sensitivities are derivatives along the swept axis, which
/// must be u_tilde or y_tilde. Throws ConfigError without a range.
Table run_price_curve(const Scenario& s);

/// Columns sweep_value, liquidity_baseline, liquidity_range.
Table run_liquidity_curve(const Scenario& s);

/// Premiums with and without the range, the sign of their difference,
/// the benchmark B0 with its sign table, and the premium sensitivities.
/// "flagged" is true when Monte Carlo missed its standard-error target.
nlohmann::json run_premium_report(const Scenario& s);

/// Names accepted in sweep.quantities.
const std::vector<std::string>& sweep_quantities();

/// Any derived quantity against one swept input (state, market field or
/// range geometry). Range-dependent quantities need a range.
Table run_sweep(const Scenario& s);

}  // namespace rangeeq::experiment
