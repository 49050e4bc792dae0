// Acceptance suite: one PASS/FAIL line per criterion, with timing.
//
//   rangeeq_acceptance [--cli PATH] [N ...]
//
// Runs the listed criteria (all when none are given) and exits non-zero
// when any of them fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rangeeq/equilibrium.hpp"
#include "rangeeq/experiment/draws.hpp"
#include "rangeeq/experiment/scenario.hpp"
#include "rangeeq/premium.hpp"
#include "rangeeq/statics.hpp"
#include "rangeeq/truncnorm.hpp"
#include "rangeeq/utility_oracle.hpp"

using namespace rangeeq;
namespace ex = rangeeq::experiment;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 42;

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double time_limit;  // seconds; 0 for none
    std::function<Outcome()> run;
};

std::string num(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

// Five-point derivative with a power-of-two step near eps^(1/5) * scale.
double five_point(const std::function<double(double)>& f, double x, double scale) {
    const double h = std::exp2(std::round(std::log2(scale * std::pow(2.0, -52.0 / 5.0))));
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

int run_command(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::vector<double> column(const std::string& name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        std::vector<double> out;
        if (it == header.end()) {
            return out;
        }
        const auto i = static_cast<std::size_t>(it - header.begin());
        for (const auto& r : rows) {
            out.push_back(r.at(i));
        }
        return out;
    }
};

Csv parse_csv(const std::string& text) {
    Csv csv;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::istringstream cells(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(cells, cell, ',')) {
            if (first) {
                csv.header.push_back(cell);
            } else {
                row.push_back(std::stod(cell));
            }
        }
        if (!first) {
            csv.rows.push_back(row);
        }
        first = false;
    }
    return csv;
}

// Number of strict interior local maxima.
int count_peaks(const std::vector<double>& v) {
    int peaks = 0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (v[i] > v[i - 1] && v[i] >= v[i + 1]) {
            ++peaks;
        }
    }
    return peaks;
}

// 1. Kernel correctness on random draws.
Outcome kernel_correctness() {
    ex::Draws d(kSeed, 101);
    double worst_fd = 0.0;
    int outside = 0;
    int slope_bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const double sd = d.uniform(0.1, 5.0);
        const double lo = d.uniform(-50.0, 50.0);
        const double len = sd * d.uniform(0.5, 10.0);
        const TruncatedNormal k({lo, lo + len}, NoiseScale::from_sd(sd));
        const double t = lo + 0.5 * len + 10.0 * sd * d.uniform(-1.0, 1.0);
        const KernelPoint p = k.at(t);
        if (!(p.mean > lo && p.mean < lo + len)) {
            ++outside;
        }
        if (!(p.slope > 0.0 && p.slope < 1.0)) {
            ++slope_bad;
        }
        const double fd = five_point([&](double x) { return k.mean(x); }, t, sd);
        worst_fd = std::max(worst_fd, std::abs(fd - p.slope) / p.slope);
    }
    return {outside == 0 && slope_bad == 0 && worst_fd <= 1e-6,
            "mean outside " + std::to_string(outside) + ", slope outside (0,1) " +
                std::to_string(slope_bad) + ", worst relative FD error " + num(worst_fd)};
}

// 2. Tail limits along d in {5, 10, 20, 40, 80} sigma.
Outcome tail_limits() {
    const TruncatedNormal k({22.0, 28.0}, NoiseScale::from_sd(1.0));
    bool ok = true;
    std::string detail;
    for (int side : {+1, -1}) {
        double prev_h = INFINITY;
        double prev_r = INFINITY;
        double h = 0.0;
        double r = 0.0;
        bool monotone = true;
        for (double dist : {5.0, 10.0, 20.0, 40.0, 80.0}) {
            const double t = side > 0 ? 28.0 + dist : 22.0 - dist;
            const KernelPoint p = k.at(t);
            h = p.slope;
            r = side > 0 ? 28.0 - p.mean : p.mean - 22.0;
            monotone = monotone && h < prev_h && r < prev_r;
            prev_h = h;
            prev_r = r;
        }
        ok = ok && monotone && h < 1e-10 && r < 1e-10;
        detail += std::string(side > 0 ? "above" : "below") + ": monotone " +
                  (monotone ? "yes" : "no") + ", final slope " + num(h) + ", final residual " +
                  num(r) + "; ";
    }
    detail += "target 1e-10";
    return {ok, detail};
}

// 3. Brute-force utility maximization against the closed-form demands.
Outcome demand_oracle() {
    ex::Draws d(kSeed, 103);
    double worst_informed = 0.0;
    double worst_uninformed = 0.0;
    double worst_resolution = 0.0;
    for (int i = 0; i < 200; ++i) {
        const MarketParams p = d.params();
        const EquilibriumCoefficients c = solve_coefficients(p);
        const MarketState st = d.state(p);
        const double x = price_argument(c, st);
        const Range range = d.range_near(x, std::sqrt(p.sigma_eps2));
        const TruncatedNormal k = make_kernel(p, range);
        const double price = k.mean(x);

        const double closed_i = informed_demand_at_price(k, p, st.u_tilde, price);
        const double res_i = demand_bracket(closed_i).resolution();
        worst_informed = std::max(
            worst_informed, std::abs(informed_utility_argmax(price, st.u_tilde, range, p) - closed_i) / res_i);

        const double closed_u = uninformed_demand(c, p, k, price);
        const double res_u = demand_bracket(closed_u).resolution();
        worst_uninformed = std::max(
            worst_uninformed, std::abs(uninformed_utility_argmax(price, range, c, p) - closed_u) / res_u);
        worst_resolution = std::max({worst_resolution, res_i, res_u});
    }
    const bool ok = worst_resolution <= 1e-4 && worst_informed <= 1.0 && worst_uninformed <= 1.0;
    return {ok, "worst gap in grid steps: informed " + num(worst_informed) + ", uninformed " +
                    num(worst_uninformed) + "; coarsest resolution " + num(worst_resolution)};
}

// 4. Clearing and inversion over 20 parameter sets x 500 states.
Outcome equilibrium_consistency() {
    ex::Draws d(kSeed, 104);
    double worst_gap = 0.0;
    double worst_inverse = 0.0;
    for (int s = 0; s < 20; ++s) {
        const MarketParams p = d.params();
        const EquilibriumCoefficients c = solve_coefficients(p);
        for (int i = 0; i < 500; ++i) {
            const MarketState st = d.state(p);
            const double x = price_argument(c, st);
            const TruncatedNormal k = make_kernel(p, d.range_near(x, std::sqrt(p.sigma_eps2)));
            const double price = k.mean(x);
            const Demands dem{informed_demand_at_price(k, p, st.u_tilde, price),
                              uninformed_demand(c, p, k, price)};
            worst_gap = std::max(worst_gap, std::abs(clearing_gap(p, dem, st)));
            worst_inverse = std::max(worst_inverse, std::abs(k.invert_mean(price) - x));
        }
    }
    return {worst_gap <= 1e-8 && worst_inverse <= 1e-9,
            "worst clearing gap " + num(worst_gap) + ", worst inversion error " + num(worst_inverse)};
}

// 5. Orderings and the reaction identity on the curve grids.
Outcome orderings() {
    const MarketParams base;
    const EquilibriumCoefficients c = solve_coefficients(base);
    int violations = 0;
    double worst_identity = 0.0;
    int points = 0;
    for (const Range& r : {Range{22.0, 28.0}, Range{23.0, 27.0}}) {
        const TruncatedNormal k = make_kernel(base, r);
        ex::SweepSpec u;
        ex::SweepSpec y;
        y.axis = "y_tilde";
        y.start = 22.0;
        y.stop = 33.0;
        y.steps = 111;
        for (const ex::SweepSpec& sweep : {u, y}) {
            for (double v : sweep.values()) {
                const MarketState st = sweep.state_at(v);
                const double s0 = sensitivity_to_signal_baseline(c);
                const double s1 = sensitivity_to_signal_range(c, k, st);
                const double l0 = liquidity_baseline(c);
                const double l1 = liquidity_range(c, k, st);
                if (!(s1 < s0 && s0 < 1.0 && l1 > l0)) {
                    ++violations;
                }
                worst_identity = std::max(
                    worst_identity, std::abs(s1 / s0 + sensitivity_to_range_move(c, k, st) - 1.0));
                ++points;
            }
        }
    }
    return {violations == 0 && worst_identity <= 1e-12,
            std::to_string(points) + " points, ordering violations " + std::to_string(violations) +
                ", worst identity error " + num(worst_identity)};
}

// 6. Curve signatures from the command-line tool.
Outcome figure_signatures(const std::string& cli, const fs::path& dir) {
    const fs::path price_csv = dir / "price.csv";
    const fs::path liq_csv = dir / "liquidity.csv";
    if (run_command(cli + " price-curve --out " + price_csv.string()) != 0 ||
        run_command(cli + " liquidity-curve --out " + liq_csv.string()) != 0) {
        return {false, "curve commands failed"};
    }
    const Csv pc = parse_csv(slurp(price_csv));
    const Csv lc = parse_csv(slurp(liq_csv));
    const std::vector<double> price = pc.column("price_range");
    const std::vector<double> sens = pc.column("sens_range");
    const std::vector<double> tau = pc.column("sens_baseline");
    const std::vector<double> liq = lc.column("liquidity_range");
    const std::vector<double> liq0 = lc.column("liquidity_baseline");
    if (price.size() < 3 || liq.size() < 3) {
        return {false, "curves missing columns"};
    }

    bool bounded = true;
    bool increasing = true;
    bool below_tau = true;
    for (std::size_t i = 0; i < price.size(); ++i) {
        bounded = bounded && price[i] > 22.0 && price[i] < 28.0;
        increasing = increasing && (i == 0 || price[i] > price[i - 1]);
        below_tau = below_tau && sens[i] < tau[i];
    }
    const double peak = *std::max_element(sens.begin(), sens.end());
    // Saturating: the slope at both ends is a small fraction of its peak.
    const bool saturating = sens.front() < 0.01 * peak && sens.back() < 0.01 * peak;
    const int sens_peaks = count_peaks(sens);

    bool above = true;
    for (std::size_t i = 0; i < liq.size(); ++i) {
        above = above && liq[i] > liq0[i];
    }
    std::vector<double> neg(liq.size());
    std::transform(liq.begin(), liq.end(), neg.begin(), [](double v) { return -v; });
    const int troughs = count_peaks(neg);
    const double low = *std::min_element(liq.begin(), liq.end());
    const bool diverging = liq.front() > 100.0 * liq0.front() && liq.back() > 100.0 * liq0.back() &&
                           liq.front() > 100.0 * low && liq.back() > 100.0 * low;

    const bool ok = bounded && increasing && saturating && sens_peaks == 1 && below_tau && above &&
                    troughs == 1 && diverging;
    std::ostringstream s;
    s << "price bounded " << bounded << " increasing " << increasing << " saturating "
      << saturating << "; sensitivity peaks " << sens_peaks << " below tau " << below_tau
      << "; liquidity above baseline " << above << " troughs " << troughs << " ends/baseline "
      << num(liq.front() / liq0.front()) << ", " << num(liq.back() / liq0.back());
    return {ok, s.str()};
}

// 7. Premium signs by Monte Carlo at 1e6 samples.
Outcome premium_signs() {
    ex::Draws d(kSeed, 107);
    int bad_centered = 0;
    int bad_above = 0;
    int bad_below = 0;
    double worst_centered = 0.0;
    for (int s = 0; s < 20; ++s) {
        const MarketParams p = d.params();
        const EquilibriumCoefficients c = solve_coefficients(p);
        const double length = 6.0 * std::sqrt(p.sigma_eps2);
        const QuadratureSpec q = QuadratureSpec::monte_carlo(1'000'000, kSeed + s);
        auto delta = [&](double midpoint) {
            return premium_with_range(c, make_kernel(p, Range::centered(midpoint, length)), p.mu0, q);
        };
        const PremiumReport centered = delta(c.B0);
        const double band = std::max(1e-8, 3.0 * centered.standard_error);
        worst_centered = std::max(worst_centered, std::abs(centered.delta) / band);
        if (std::abs(centered.delta) > band) {
            ++bad_centered;
        }
        const PremiumReport up = delta(c.B0 + 5.0);
        if (!(up.delta + 3.0 * up.standard_error < 0.0)) {
            ++bad_above;
        }
        const PremiumReport down = delta(c.B0 - 5.0);
        if (!(down.delta - 3.0 * down.standard_error > 0.0)) {
            ++bad_below;
        }
    }
    return {bad_centered == 0 && bad_above == 0 && bad_below == 0,
            "failures: centered " + std::to_string(bad_centered) + ", midpoint B0+5 " +
                std::to_string(bad_above) + ", midpoint B0-5 " + std::to_string(bad_below) +
                "; worst centered |delta|/band " + num(worst_centered)};
}

// 8. Signs of the B0 derivatives.
Outcome b0_signs() {
    ex::Draws d(kSeed, 108);
    int mismatches = 0;
    std::string first;
    for (int s = 0; s < 20; ++s) {
        for (const SignedDerivative& g : B0_comparative_statics(d.params())) {
            if (!g.sign_matches) {
                ++mismatches;
                if (first.empty()) {
                    first = "; first: set " + std::to_string(s) + " " + g.parameter;
                }
            }
        }
    }
    return {mismatches == 0, "sign mismatches " + std::to_string(mismatches) + first};
}

// 9. Limit probes for prices, liquidity and premiums.
Outcome limit_probes() {
    const MarketParams p;
    const EquilibriumCoefficients c = solve_coefficients(p);
    const MarketState st{6.0, 10.0};
    ProbeSettings settings;
    settings.target = 1e-6;
    const double length = 6.0;
    std::vector<ProbeReport> reports;

    const std::pair<PriceProbe, Side> price_far[] = {
        {PriceProbe::SignalFar, Side::Above},    {PriceProbe::SignalFar, Side::Below},
        {PriceProbe::UpperFar, Side::Above},     {PriceProbe::LowerFar, Side::Below},
        {PriceProbe::RangeMoveFar, Side::Above}, {PriceProbe::RangeMoveFar, Side::Below},
        {PriceProbe::LiquidityFar, Side::Above}, {PriceProbe::LiquidityFar, Side::Below},
        {PriceProbe::DriverFar, Side::Above},    {PriceProbe::DriverFar, Side::Below},
    };
    for (const auto& [probe, side] : price_far) {
        reports.push_back(probe_price_limit(probe, side, c, p, st, length,
                                            default_far_points(c, p, side), settings));
    }
    const std::vector<double> widths = geometric_sequence(4.0, 2.0, 64.0);
    for (PriceProbe probe : {PriceProbe::SignalWide, PriceProbe::RangeMoveWide}) {
        reports.push_back(probe_price_limit(probe, Side::Above, c, p, st, length, widths, settings));
    }

    const std::pair<PremiumProbe, Side> premium_far[] = {
        {PremiumProbe::UpperFar, Side::Above},    {PremiumProbe::LowerFar, Side::Below},
        {PremiumProbe::MidpointFar, Side::Above}, {PremiumProbe::MidpointFar, Side::Below},
        {PremiumProbe::Mu0Far, Side::Above},      {PremiumProbe::Mu0Far, Side::Below},
    };
    for (const auto& [probe, side] : premium_far) {
        reports.push_back(probe_premium_limit(probe, side, c, p, length,
                                              default_premium_far_points(c, p, side, 1e-6), {},
                                              settings));
    }
    const std::vector<double> premium_widths =
        geometric_sequence(4.0, 2.0, 2.0 * std::abs(c.theta) / c.sigma_X() + 40.0);
    for (PremiumProbe probe : {PremiumProbe::DeltaWide, PremiumProbe::MidpointWide}) {
        reports.push_back(
            probe_premium_limit(probe, Side::Above, c, p, length, premium_widths, {}, settings));
    }

    int failed = 0;
    double worst = 0.0;
    std::string names;
    for (const ProbeReport& r : reports) {
        worst = std::max(worst, r.terminal_residual());
        if (!r.passed()) {
            ++failed;
            names += " " + r.name;
        }
    }
    return {failed == 0, std::to_string(reports.size()) + " probes, failed " +
                             std::to_string(failed) + names + "; worst terminal residual " +
                             num(worst)};
}

// 10. Two verification runs give byte-identical reports.
Outcome determinism(const std::string& cli, const fs::path& dir) {
    std::string reports[2];
    for (int i = 0; i < 2; ++i) {
        const fs::path out = dir / ("verify_" + std::to_string(i) + ".json");
        const int code = run_command(cli + " verify --seed 42 --verbosity quiet --out " +
                                     out.string() + " > /dev/null");
        // 2 means some check failed; the report is still complete.
        if (code != 0 && code != 2) {
            return {false, "verify exited with " + std::to_string(code)};
        }
        reports[i] = slurp(out);
    }
    const bool ok = !reports[0].empty() && reports[0] == reports[1];
    return {ok, std::to_string(reports[0].size()) + " bytes, identical " + (ok ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli = RANGEEQ_CLI;
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--cli" && i + 1 < argc) {
            cli = argv[++i];
        } else {
            try {
                wanted.push_back(std::stoi(a));
            } catch (const std::exception&) {
                std::cerr << "usage: rangeeq_acceptance [--cli PATH] [N ...]\n";
                return 64;
            }
        }
    }

    const fs::path dir = fs::temp_directory_path() /
                         ("rangeeq_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);

    const std::vector<Criterion> criteria = {
        {1, "kernel_correctness", 5.0, kernel_correctness},
        {2, "tail_limits", 1.0, tail_limits},
        {3, "demand_oracle_equivalence", 60.0, demand_oracle},
        {4, "equilibrium_consistency", 0.0, equilibrium_consistency},
        {5, "ordering_results", 0.0, orderings},
        {6, "figure_signatures", 0.0, [&] { return figure_signatures(cli, dir); }},
        {7, "premium_signs", 120.0, premium_signs},
        {8, "b0_derivative_signs", 0.0, b0_signs},
        {9, "limit_probes", 0.0, limit_probes},
        {10, "determinism", 0.0, [&] { return determinism(cli, dir); }},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit > 0.0 && secs >= c.time_limit) {
            o.passed = false;
            o.detail += "; over the " + num(c.time_limit) + " s limit";
        }
        std::cout << "criterion " << c.id << " " << c.name << ": " << (o.passed ? "PASS" : "FAIL")
                  << " (" << num(secs) << " s) " << o.detail << std::endl;
        failures += o.passed ? 0 : 1;
    }
    fs::remove_all(dir);
    return failures == 0 ? 0 : 1;
}
