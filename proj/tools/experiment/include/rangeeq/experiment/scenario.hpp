#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rangeeq/equilibrium.hpp"
#include "rangeeq/premium.hpp"
#include "rangeeq/truncnorm.hpp"

namespace rangeeq::experiment {

/// Malformed or inconsistent scenario configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One-dimensional grid plus the values held fixed off the swept axis.
struct SweepSpec {
    // u_tilde or y_tilde for the curve commands; the generic sweep also
    // accepts any market field and lower, upper, midpoint, length.
    std::string axis = "u_tilde";
    double start = 96.0;
    double stop = 176.0;
    int steps = 161;
    double u_tilde = 6.0;
    double y_tilde = 10.0;
    // Columns for the generic sweep; empty means all that apply.
    std::vector<std::string> quantities;

    std::vector<double> values() const;
    MarketState state_at(double value) const;

    bool operator==(const SweepSpec&) const = default;
};

struct OutputSpec {
    std::string path;  // empty writes to stdout
    std::string format = "csv";

    bool operator==(const OutputSpec&) const = default;
};

struct Scenario {
    MarketParams market;
    std::optional<Range> range;
    SweepSpec sweep;
    QuadratureSpec quad;
    OutputSpec output;

    bool operator==(const Scenario&) const = default;
};

/// Price-curve defaults: the base market, range [22, 28], u swept at y = 10.
Scenario price_curve_defaults();
/// Liquidity-curve defaults: as above with range [23, 27].
Scenario liquidity_curve_defaults();

/// Overlays a config document on `base`. Sections are market, range,
/// sweep, quadrature and output; unknown sections or keys are errors, as
/// are wrong types and values that fail validation.
Scenario parse_scenario(const nlohmann::json& doc, Scenario base);
Scenario load_scenario(const std::string& path, Scenario base);

/// Complete effective configuration; parse_scenario(to_json(s), any) == s.
nlohmann::json to_json(const Scenario& s);

QuadratureMethod parse_quadrature_method(const std::string& name);

}  // namespace rangeeq::experiment
