#include <charconv>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "rangeeq/experiment/draws.hpp"
#include "rangeeq/experiment/runs.hpp"
#include "rangeeq/experiment/scenario.hpp"
#include "rangeeq/experiment/table.hpp"
#include "rangeeq/experiment/verify.hpp"

using namespace rangeeq;
namespace ex = rangeeq::experiment;
using nlohmann::json;

namespace {

// Small enough to run in a few seconds, large enough to see a degraded kernel.
ex::VerifyOptions quick_options() {
    ex::VerifyOptions o;
    o.kernel_draws = 200;
    o.demand_draws = 20;
    o.param_sets = 4;
    o.states_per_set = 5;
    o.premium_sets = 2;
    o.mc_samples = 200'000;
    return o;
}

}  // namespace

TEST(Scenario, RoundTripsThroughJson) {
    ex::Scenario s = ex::price_curve_defaults();
    s.market.gamma = 1.75;
    s.market.D0 = -3.0;
    s.range = Range{-1.5, 2.25};
    s.sweep.axis = "y_tilde";
    s.sweep.quantities = {"price_range", "liquidity_range"};
    s.quad = QuadratureSpec::monte_carlo(20'000, 7);
    s.output.format = "json";
    EXPECT_EQ(ex::parse_scenario(ex::to_json(s), ex::liquidity_curve_defaults()), s);
    EXPECT_EQ(ex::parse_scenario(ex::to_json(ex::price_curve_defaults()), s), ex::price_curve_defaults());
}

TEST(Scenario, OverlaysPartialDocuments) {
    const ex::Scenario s = ex::parse_scenario(json::parse(R"({"market": {"Z": 3}})"),
                                              ex::price_curve_defaults());
    EXPECT_EQ(s.market.Z, 3.0);
    EXPECT_EQ(s.market.gamma, ex::price_curve_defaults().market.gamma);
    EXPECT_EQ(s.range, ex::price_curve_defaults().range);
}

TEST(Scenario, RejectsUnknownOrInvalidEntries) {
    const ex::Scenario base = ex::price_curve_defaults();
    for (const char* doc : {
             R"({"markt": {}})",
             R"({"market": {"gama": 3}})",
             R"({"market": {"gamma": "three"}})",
             R"({"market": {"gamma": -1}})",
             R"({"market": {"x_I": 1.0}})",
             R"({"range": {"lower": 5, "upper": 1}})",
             R"({"quadrature": {"method": "simpson"}})",
             R"({"quadrature": {"method": "hermite", "count": 3}})",
             R"({"output": {"format": "xml"}})",
             R"([1, 2])",
         }) {
        EXPECT_THROW(ex::parse_scenario(json::parse(doc), base), ex::ConfigError) << doc;
    }
}

TEST(Table, ShortestRoundTripText) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, (i % 40) - 20);
        const std::string s = ex::format_double(v);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        EXPECT_EQ(back, v) << s;
    }
    EXPECT_EQ(ex::format_double(0.1), "0.1");
    EXPECT_EQ(ex::format_double(96.0), "96");
}

TEST(Table, CsvRoundTrip) {
    const ex::Table t = ex::run_price_curve(ex::price_curve_defaults());
    std::ostringstream out;
    ex::write_csv(out, t);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "sweep_value,price_baseline,price_range,sens_baseline,sens_range");
    std::size_t row = 0;
    while (std::getline(in, line)) {
        std::istringstream cells(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(cells, cell, ',')) {
            double v = 0.0;
            std::from_chars(cell.data(), cell.data() + cell.size(), v);
            EXPECT_EQ(v, t.rows[row][col]);
            ++col;
        }
        EXPECT_EQ(col, t.columns.size());
        ++row;
    }
    EXPECT_EQ(row, t.rows.size());
}

TEST(Runs, PriceCurveShape) {
    const ex::Table t = ex::run_price_curve(ex::price_curve_defaults());
    ASSERT_EQ(t.rows.size(), 161u);
    const std::vector<double> price = t.column("price_range");
    const std::vector<double> sens = t.column("sens_range");
    const std::vector<double> base = t.column("sens_baseline");
    std::size_t peak = 0;
    for (std::size_t i = 0; i < price.size(); ++i) {
        EXPECT_GT(price[i], 22.0);
        EXPECT_LT(price[i], 28.0);
        EXPECT_LT(sens[i], base[i]);
        if (i > 0) {
            EXPECT_GT(price[i], price[i - 1]);
        }
        if (sens[i] > sens[peak]) {
            peak = i;
        }
    }
    for (std::size_t i = 1; i <= peak; ++i) {
        EXPECT_GE(sens[i], sens[i - 1]);
    }
    for (std::size_t i = peak + 1; i < sens.size(); ++i) {
        EXPECT_LE(sens[i], sens[i - 1]);
    }
}

TEST(Runs, LiquidityCurveShape) {
    const ex::Table t = ex::run_liquidity_curve(ex::liquidity_curve_defaults());
    const std::vector<double> base = t.column("liquidity_baseline");
    const std::vector<double> liq = t.column("liquidity_range");
    std::size_t low = 0;
    for (std::size_t i = 0; i < liq.size(); ++i) {
        EXPECT_GT(liq[i], base[i]);
        if (liq[i] < liq[low]) {
            low = i;
        }
    }
    EXPECT_GT(low, 0u);
    EXPECT_LT(low, liq.size() - 1);
    EXPECT_GT(liq.front(), 10.0 * liq[low]);
    EXPECT_GT(liq.back(), 10.0 * liq[low]);
}

TEST(Runs, CurvesNeedARange) {
    ex::Scenario s = ex::price_curve_defaults();
    s.range.reset();
    EXPECT_THROW(ex::run_price_curve(s), ex::ConfigError);
}

TEST(Runs, SweepRejectsUnknownQuantity) {
    ex::Scenario s = ex::price_curve_defaults();
    s.sweep.quantities = {"nonsense"};
    EXPECT_THROW(ex::run_sweep(s), ex::ConfigError);
}

TEST(Runs, PremiumReportAtTheBaseMarket) {
    const json doc = ex::run_premium_report(ex::price_curve_defaults());
    EXPECT_FALSE(doc.at("flagged").get<bool>());
}

TEST(Draws, StreamsAreIndependentAndReproducible) {
    ex::Draws a(42, 3), b(42, 3), c(42, 4);
    const double x = a.uniform(0, 1);
    EXPECT_EQ(x, b.uniform(0, 1));
    EXPECT_NE(x, c.uniform(0, 1));
    for (int i = 0; i < 100; ++i) {
        const MarketParams p = a.params();
        EXPECT_NO_THROW(p.validate());
        EXPECT_GE(p.x_I, 0.1);
        EXPECT_LE(p.x_I, 0.9);
    }
}

TEST(Verify, ReportIsDeterministic) {
    const ex::VerifyOptions o = quick_options();
    EXPECT_EQ(ex::run_verify(o).to_json().dump(), ex::run_verify(o).to_json().dump());
}

TEST(Verify, OnlyTheUninformedClosedFormFails) {
    const ex::VerifyReport r = ex::run_verify(quick_options());
    for (const ex::Check& c : r.checks) {
        if (c.name == "uninformed_demand.closed_form_argmax") {
            EXPECT_FALSE(c.passed);
        } else {
            EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
        }
    }
    EXPECT_EQ(r.failures(), 1u);
    EXPECT_NE(r.find("kernel.slope_matches_finite_difference"), nullptr);
}

TEST(Verify, ShallowContinuedFractionIsCaught) {
    ex::VerifyOptions o = quick_options();
    o.kernel.continued_fraction_depth = 2;
    const ex::VerifyReport r = ex::run_verify(o);
    const ex::Check* kernel_fd = r.find("kernel.slope_matches_finite_difference");
    const ex::Check* premium_fd = r.find("premium.sensitivities_match_finite_difference");
    ASSERT_NE(kernel_fd, nullptr);
    ASSERT_NE(premium_fd, nullptr);
    EXPECT_FALSE(kernel_fd->passed);
    EXPECT_FALSE(premium_fd->passed);
}

TEST(Verify, LowTailThresholdWithShallowFractionIsCaught) {
    ex::VerifyOptions o = quick_options();
    o.kernel.tail_threshold = 2.0;
    o.kernel.continued_fraction_depth = 2;
    const ex::VerifyReport r = ex::run_verify(o);
    EXPECT_GE(r.failures(), 4u);
    EXPECT_FALSE(r.find("informed_demand.closed_form_argmax")->passed);
}
