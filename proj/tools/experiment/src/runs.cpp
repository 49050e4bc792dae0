#include "rangeeq/experiment/runs.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "rangeeq/errors.hpp"
#include "rangeeq/statics.hpp"

namespace rangeeq::experiment {

using nlohmann::json;

namespace {

const Range& require_range(const Scenario& s, const char* command) {
    if (!s.range) {
        throw ConfigError(std::string(command) + " needs a range section");
    }
    return *s.range;
}

void require_state_axis(const Scenario& s, const char* command) {
    if (s.sweep.axis != "u_tilde" && s.sweep.axis != "y_tilde") {
        throw ConfigError(std::string(command) + " sweeps u_tilde or y_tilde, not '" +
                          s.sweep.axis + "'");
    }
}

double& market_field(MarketParams& p, const std::string& name) {
    static const std::map<std::string, double MarketParams::*> fields = {
        {"gamma", &MarketParams::gamma},       {"mu0", &MarketParams::mu0},
        {"sigma_u2", &MarketParams::sigma_u2}, {"sigma_eps2", &MarketParams::sigma_eps2},
        {"sigma_y2", &MarketParams::sigma_y2}, {"x_I", &MarketParams::x_I},
        {"Z", &MarketParams::Z},               {"D0", &MarketParams::D0},
    };
    return p.*(fields.at(name));
}

bool is_market_field(const std::string& name) {
    return name != "u_tilde" && name != "y_tilde" && name != "lower" && name != "upper" &&
           name != "midpoint" && name != "length";
}

const std::vector<std::string> kStateColumns = {
    "tau",          "alpha",          "beta",      "B0",         "sigma_X",
    "X",            "price_baseline", "sens_baseline", "liquidity_baseline", "premium0"};
const std::vector<std::string> kRangeColumns = {
    "price_range",  "sens_range", "range_move", "sens_upper", "sens_lower",
    "liquidity_range", "premium1", "delta_premium"};

}  // namespace

json run_equilibrium(const Scenario& s) {
    const EquilibriumCoefficients c = solve_coefficients(s.market);
    const ClearingResiduals r = clearing_residuals(s.market, c);
    const MarketState state{s.sweep.u_tilde, s.sweep.y_tilde};
    json out;
    out["coefficients"] = {{"tau", c.tau},           {"alpha", c.alpha},
                           {"beta", c.beta},         {"omega1", c.omega1},
                           {"omega2", c.omega2},     {"sigma_eta2", c.sigma_eta2},
                           {"B0", c.B0},             {"sigma_X2", c.sigma_X2},
                           {"theta", c.theta}};
    out["clearing_residuals"] = {
        {"signal", r.signal}, {"noise", r.noise}, {"intercept", r.intercept}};
    const Demands base = baseline_demands(c, s.market, state);
    json at = {{"u_tilde", state.u_tilde},
               {"y_tilde", state.y_tilde},
               {"X", price_argument(c, state)},
               {"price_baseline", price_baseline(c, state)},
               {"informed_baseline", base.informed},
               {"uninformed_baseline", base.uninformed}};
    if (s.range) {
        const TruncatedNormal k = make_kernel(s.market, *s.range);
        const double p = price_with_range(c, k, state);
        const Demands d{informed_demand(c, s.market, state),
                        uninformed_demand(c, s.market, k, p)};
        at["price_range"] = p;
        at["informed_range"] = d.informed;
        at["uninformed_range"] = d.uninformed;
        at["clearing_gap_range"] = clearing_gap(s.market, d, state);
    }
    out["state"] = at;
    return out;
}

Table run_price_curve(const Scenario& s) {
    const Range& range = require_range(s, "price-curve");
    require_state_axis(s, "price-curve");
    const EquilibriumCoefficients c = solve_coefficients(s.market);
    const TruncatedNormal k = make_kernel(s.market, range);
    const double weight = s.sweep.axis == "u_tilde" ? c.tau : c.alpha;
    Table t;
    t.columns = {"sweep_value", "price_baseline", "price_range", "sens_baseline", "sens_range"};
    for (double v : s.sweep.values()) {
        const MarketState st = s.sweep.state_at(v);
        const double x = price_argument(c, st);
        t.rows.push_back({v, price_baseline(c, st), k.mean(x), weight, weight * k.slope(x)});
    }
    return t;
}

Table run_liquidity_curve(const Scenario& s) {
    const Range& range = require_range(s, "liquidity-curve");
    require_state_axis(s, "liquidity-curve");
    const EquilibriumCoefficients c = solve_coefficients(s.market);
    const TruncatedNormal k = make_kernel(s.market, range);
    Table t;
    t.columns = {"sweep_value", "liquidity_baseline", "liquidity_range"};
    for (double v : s.sweep.values()) {
        const MarketState st = s.sweep.state_at(v);
        t.rows.push_back({v, liquidity_baseline(c), liquidity_range(c, k, st)});
    }
    return t;
}

json run_premium_report(const Scenario& s) {
    const Range& range = require_range(s, "premium");
    const EquilibriumCoefficients c = solve_coefficients(s.market);
    const TruncatedNormal k = make_kernel(s.market, range);
    const PremiumReport rep = premium_with_range(c, k, s.market.mu0, s.quad);
    const PremiumSensitivities sens = premium_sensitivities(c, k, s.quad);
    const B0Diagnostic diag = B0_printed_form_check(s.market);

    json out;
    out["quadrature"] = {{"method", to_string(s.quad.method)},
                         {"count", s.quad.resolved_count()},
                         {"seed", s.quad.seed}};
    out["B0"] = c.B0;
    out["theta"] = c.theta;
    out["sigma_X"] = c.sigma_X();
    out["premium0"] = rep.premium0;
    out["premium1"] = rep.premium1;
    out["delta"] = rep.delta;
    out["standard_error"] = rep.standard_error;
    out["sign"] = to_string(rep.sign_class);
    out["midpoint_class"] = to_string(classify_by_midpoint(range, c));
    out["flagged"] = rep.flagged;
    out["B0_printed_form"] = {{"from_definition", diag.from_definition},
                              {"printed_form", diag.printed_form},
                              {"difference", diag.difference}};
    json signs = json::array();
    for (const SignedDerivative& d : B0_comparative_statics(s.market)) {
        signs.push_back({{"parameter", d.parameter},
                         {"derivative", d.derivative},
                         {"expected_sign", d.expected_sign},
                         {"sign_matches", d.sign_matches}});
    }
    out["B0_signs"] = signs;
    out["sensitivities"] = {{"d_dupper", sens.d_dupper},
                            {"d_dlower", sens.d_dlower},
                            {"d_dmidpoint", sens.d_dmidpoint},
                            {"d_dmu0", sens.d_dmu0},
                            {"standard_error", sens.standard_error}};
    return out;
}

const std::vector<std::string>& sweep_quantities() {
    static const std::vector<std::string> all = [] {
        std::vector<std::string> v = kStateColumns;
        v.insert(v.end(), kRangeColumns.begin(), kRangeColumns.end());
        return v;
    }();
    return all;
}

Table run_sweep(const Scenario& s) {
    std::vector<std::string> wanted = s.sweep.quantities;
    const bool geometry_axis = s.sweep.axis == "lower" || s.sweep.axis == "upper" ||
                               s.sweep.axis == "midpoint" || s.sweep.axis == "length";
    if (geometry_axis && !s.range) {
        throw ConfigError("sweeping '" + s.sweep.axis + "' needs a range section");
    }
    if (wanted.empty()) {
        wanted = kStateColumns;
        if (s.range) {
            wanted.insert(wanted.end(), kRangeColumns.begin(), kRangeColumns.end());
        }
    }
    for (const std::string& q : wanted) {
        const auto& all = sweep_quantities();
        if (std::find(all.begin(), all.end(), q) == all.end()) {
            throw ConfigError("unknown sweep quantity '" + q + "'");
        }
        const bool needs_range =
            std::find(kRangeColumns.begin(), kRangeColumns.end(), q) != kRangeColumns.end();
        if (needs_range && !s.range) {
            throw ConfigError("sweep quantity '" + q + "' needs a range section");
        }
    }

    Table t;
    t.columns.push_back("sweep_value");
    t.columns.insert(t.columns.end(), wanted.begin(), wanted.end());
    for (double v : s.sweep.values()) {
        MarketParams p = s.market;
        std::optional<Range> range = s.range;
        if (is_market_field(s.sweep.axis)) {
            market_field(p, s.sweep.axis) = v;
            try {
                p.validate();
            } catch (const InvalidParameter& e) {
                throw ConfigError("sweep value " + format_double(v) + ": " + e.what());
            }
        } else if (s.sweep.axis == "lower") {
            range->lower = v;
        } else if (s.sweep.axis == "upper") {
            range->upper = v;
        } else if (s.sweep.axis == "midpoint") {
            range = Range::centered(v, range->length());
        } else if (s.sweep.axis == "length") {
            range = Range::centered(range->midpoint(), v);
        }
        const MarketState st = s.sweep.state_at(v);
        const EquilibriumCoefficients c = solve_coefficients(p);
        const double x = price_argument(c, st);

        std::optional<TruncatedNormal> k;
        std::optional<PremiumReport> prem;
        auto kernel = [&]() -> const TruncatedNormal& {
            if (!k) {
                try {
                    k.emplace(make_kernel(p, *range));
                } catch (const DomainError& e) {
                    throw ConfigError("sweep value " + format_double(v) + ": " + e.what());
                }
            }
            return *k;
        };
        auto premium = [&]() -> const PremiumReport& {
            if (!prem) {
                prem = premium_with_range(c, kernel(), p.mu0, s.quad);
                t.flagged = t.flagged || prem->flagged;
            }
            return *prem;
        };
        const std::map<std::string, std::function<double()>> eval = {
            {"tau", [&] { return c.tau; }},
            {"alpha", [&] { return c.alpha; }},
            {"beta", [&] { return c.beta; }},
            {"B0", [&] { return c.B0; }},
            {"sigma_X", [&] { return c.sigma_X(); }},
            {"X", [&] { return x; }},
            {"price_baseline", [&] { return price_baseline(c, st); }},
            {"sens_baseline", [&] { return sensitivity_to_signal_baseline(c); }},
            {"liquidity_baseline", [&] { return liquidity_baseline(c); }},
            {"premium0", [&] { return premium_baseline(c, p.mu0); }},
            {"price_range", [&] { return price_with_range(c, kernel(), st); }},
            {"sens_range", [&] { return sensitivity_to_signal_range(c, kernel(), st); }},
            {"range_move", [&] { return sensitivity_to_range_move(c, kernel(), st); }},
            {"sens_upper", [&] { return sensitivity_to_upper(c, kernel(), st); }},
            {"sens_lower", [&] { return sensitivity_to_lower(c, kernel(), st); }},
            {"liquidity_range", [&] { return liquidity_range(c, kernel(), st); }},
            {"premium1", [&] { return premium().premium1; }},
            {"delta_premium", [&] { return premium().delta; }},
        };
        std::vector<double> row{v};
        for (const std::string& q : wanted) {
            row.push_back(eval.at(q)());
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace rangeeq::experiment
