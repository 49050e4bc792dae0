#include "rangeeq/experiment/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "rangeeq/equilibrium.hpp"
#include "rangeeq/errors.hpp"
#include "rangeeq/experiment/draws.hpp"
#include "rangeeq/experiment/scenario.hpp"
#include "rangeeq/premium.hpp"
#include "rangeeq/statics.hpp"
#include "rangeeq/utility_oracle.hpp"

namespace rangeeq::experiment {

using nlohmann::ordered_json;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Stream ids keep each suite's draws independent of the others.
enum Stream : std::uint32_t {
    kKernelStream = 1,
    kDemandStream = 2,
    kEquilibriumStream = 3,
    kStaticsStream = 4,
    kPremiumStream = 5,
};

// Worst error over many cases against a fixed tolerance.
struct Tally {
    double worst = 0.0;
    double tol = 0.0;
    int cases = 0;
    int failures = 0;
    std::string first_failure;

    explicit Tally(double tolerance) : tol(tolerance) {}

    void add(double err, const std::string& where = {}) {
        ++cases;
        if (!(err <= tol)) {
            if (failures == 0) {
                first_failure = where;
            }
            ++failures;
        }
        if (std::isnan(err) || err > worst) {
            worst = err;
        }
    }

    void require(bool ok, const std::string& where = {}) { add(ok ? 0.0 : INFINITY, where); }

    Check to_check(std::string name) const {
        Check c;
        c.name = std::move(name);
        c.passed = failures == 0 && cases > 0;
        c.metrics["cases"] = cases;
        c.metrics["failures"] = failures;
        c.metrics["worst"] = std::isfinite(worst) ? ordered_json(worst) : ordered_json("inf");
        c.metrics["tolerance"] = tol;
        if (failures > 0) {
            c.detail = std::to_string(failures) + " of " + std::to_string(cases) + " cases over " +
                       format(tol) + (first_failure.empty() ? "" : "; first: " + first_failure);
        }
        return c;
    }

    static std::string format(double v) {
        std::ostringstream os;
        os.precision(3);
        os << v;
        return os.str();
    }
};

std::string fmt(double v) { return Tally::format(v); }

double rel_err(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

Check from_probe(std::string name, const ProbeReport& r) {
    Check c;
    c.name = std::move(name);
    c.passed = r.passed();
    c.detail = r.message;
    c.metrics["limit"] = r.limit;
    c.metrics["points"] = r.points.size();
    c.metrics["first_point"] = r.points.empty() ? 0.0 : r.points.front();
    c.metrics["last_point"] = r.points.empty() ? 0.0 : r.points.back();
    c.metrics["terminal_residual"] = r.terminal_residual();
    c.metrics["monotone"] = r.monotone;
    return c;
}

// Runs one check body; an exception fails that check only.
class Runner {
public:
    explicit Runner(VerifyReport& report) : report_(report) {}

    void run(const std::string& name, const std::function<Check()>& body) {
        Check c;
        try {
            c = body();
        } catch (const std::exception& e) {
            c = Check{};
            c.passed = false;
            c.detail = std::string("exception: ") + e.what();
        }
        c.name = name;
        report_.checks.push_back(std::move(c));
    }

    // Several checks from one pass over shared draws.
    void run_group(const std::vector<std::string>& names,
                   const std::function<std::vector<Check>()>& body) {
        std::vector<Check> out;
        try {
            out = body();
        } catch (const std::exception& e) {
            out.clear();
            for (std::size_t i = 0; i < names.size(); ++i) {
                Check c;
                c.detail = std::string("exception: ") + e.what();
                out.push_back(c);
            }
        }
        for (std::size_t i = 0; i < names.size(); ++i) {
            out[i].name = names[i];
            report_.checks.push_back(std::move(out[i]));
        }
    }

private:
    VerifyReport& report_;
};

// Fourth-order central difference; the step is a power of two so that the
// abscissae are exact.
double five_point(const std::function<double(double)>& f, double x, double scale) {
    const double h = std::ldexp(1.0, std::ilogb(std::pow(kEps, 0.2) * scale));
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

struct KernelDraw {
    Range range;
    double sd;
    double t;
};

void kernel_suite(Runner& run, const VerifyOptions& o) {
    Draws draws(o.seed, kKernelStream);
    std::vector<KernelDraw> cases;
    for (int i = 0; i < o.kernel_draws; ++i) {
        const double sd = draws.uniform(0.1, 5.0);
        const double mid = draws.uniform(-50.0, 50.0);
        const double len = draws.uniform(0.05, 20.0) * sd;
        const double t = mid + draws.uniform(-10.0, 10.0) * sd;
        cases.push_back({Range::centered(mid, len), sd, t});
    }
    auto label = [](const KernelDraw& d) {
        return "[" + fmt(d.range.lower) + ", " + fmt(d.range.upper) + "] sd " + fmt(d.sd) +
               " t " + fmt(d.t);
    };

    run.run_group(
        {"kernel.mean_inside_range", "kernel.slope_matches_finite_difference",
         "kernel.slope_in_unit_interval", "kernel.bound_shift_identity",
         "kernel.inverse_roundtrip"},
        [&] {
            Tally inside(0.0), fd(o.fd_rel_tol), unit(0.0), shift(o.identity_tol), inverse(1e-9);
            for (const KernelDraw& d : cases) {
                const TruncatedNormal k(d.range, NoiseScale::from_sd(d.sd), o.kernel);
                const KernelPoint p = k.at(d.t);
                inside.require(d.range.lower < p.mean && p.mean < d.range.upper, label(d));
                const double slope_fd =
                    five_point([&](double t) { return k.mean(t); }, d.t, d.sd);
                fd.add(rel_err(slope_fd, p.slope), label(d));
                // Over ranges many sigmas wide H rounds to 1.0; its
                // complement carries the strict upper bound.
                unit.require(p.slope > 0.0 && p.slope <= 1.0 && p.slope_complement > 0.0,
                             label(d));
                // Moving the range and the argument together moves the mean
                // one for one.
                shift.add(std::abs(p.slope + p.d_upper + p.d_lower - 1.0), label(d));
                shift.require(p.d_upper > 0.0 && p.d_lower > 0.0, label(d));
                if (p.slope > 1e-2) {
                    inverse.add(std::abs(k.invert_mean(p.mean) - d.t) / std::max(1.0, d.sd),
                                label(d));
                }
            }
            return std::vector<Check>{inside.to_check(""), fd.to_check(""), unit.to_check(""),
                                      shift.to_check(""), inverse.to_check("")};
        });

    // Far outside the range the mean settles on the nearer bound and the
    // slope vanishes; the approach is algebraic, so the probe runs far out.
    const Range r{22.0, 28.0};
    const TruncatedNormal k(r, NoiseScale::from_sd(1.0), o.kernel);
    const std::vector<double> far = geometric_sequence(5.0, 2.0, 1e9);
    ProbeSettings settings;
    settings.target = o.probe_target;
    run.run("kernel.mean_approaches_upper", [&] {
        return from_probe("", limit_probe("mean_above", far,
                                          [&](double d) { return k.mean(r.upper + d); },
                                          r.upper, settings));
    });
    run.run("kernel.mean_approaches_lower", [&] {
        return from_probe("", limit_probe("mean_below", far,
                                          [&](double d) { return k.mean(r.lower - d); },
                                          r.lower, settings));
    });
    run.run("kernel.slope_vanishes_above", [&] {
        return from_probe("", limit_probe("slope_above", far,
                                          [&](double d) { return k.slope(r.upper + d); }, 0.0,
                                          settings));
    });
    run.run("kernel.slope_vanishes_below", [&] {
        return from_probe("", limit_probe("slope_below", far,
                                          [&](double d) { return k.slope(r.lower - d); }, 0.0,
                                          settings));
    });
    // A range much wider than the noise leaves the argument untouched.
    const std::vector<double> widths = geometric_sequence(4.0, 2.0, 64.0);
    run.run("kernel.wide_range_slope_to_one", [&] {
        return from_probe("", limit_probe("slope_wide", widths,
                                          [&](double w) {
                                              return TruncatedNormal(Range::centered(3.0, w),
                                                                     NoiseScale::from_sd(1.0),
                                                                     o.kernel)
                                                  .slope(3.0 + 0.25 * w);
                                          },
                                          1.0, settings));
    });
    run.run("kernel.wide_range_mean_to_argument", [&] {
        return from_probe("", limit_probe(
                                  "mean_wide", widths,
                                  [&](double w) {
                                      const double t = 3.0 + 0.25 * w;
                                      return TruncatedNormal(Range::centered(3.0, w),
                                                             NoiseScale::from_sd(1.0), o.kernel)
                                                 .mean(t) -
                                             t;
                                  },
                                  0.0, settings));
    });
}

void demand_suite(Runner& run, const VerifyOptions& o) {
    run.run_group(
        {"informed_demand.closed_form_argmax", "uninformed_demand.closed_form_argmax",
         "uninformed_demand.first_order_maximizer", "informed_demand.first_order_sign_change",
         "utility.negative_and_flat_at_zero", "utility.endowment_invariance"},
        [&] {
            Draws draws(o.seed, kDemandStream);
            Tally informed(1.0), uninformed(1.0), maximizer(1.0), sign(0.0), negative(0.0),
                endowment(o.identity_tol);
            double worst_resolution = 0.0;
            double worst_uninformed_gap = 0.0;
            for (int i = 0; i < o.demand_draws; ++i) {
                MarketParams p = draws.params();
                const EquilibriumCoefficients c = solve_coefficients(p);
                const MarketState st = draws.state(p);
                const double x = price_argument(c, st);
                const Range range = draws.range_near(x, std::sqrt(p.sigma_eps2));
                const TruncatedNormal k = make_kernel(p, range, o.kernel);
                const double price = k.mean(x);
                const std::string where = "draw " + std::to_string(i);

                const double closed_i = informed_demand(c, p, st);
                const double res_i = demand_bracket(closed_i).resolution();
                const double arg_i = informed_utility_argmax(price, st.u_tilde, range, p);
                informed.add(std::abs(arg_i - closed_i) / res_i, where);
                worst_resolution = std::max(worst_resolution, res_i);

                const double closed_u = uninformed_demand(c, p, k, price);
                const double res_u = demand_bracket(closed_u).resolution();
                const double arg_u = uninformed_utility_argmax(price, range, c, p);
                uninformed.add(std::abs(arg_u - closed_u) / res_u, where);
                worst_uninformed_gap = std::max(worst_uninformed_gap, std::abs(arg_u - closed_u));
                maximizer.add(
                    std::abs(arg_u - uninformed_utility_maximizer(price, range, c, p)) / res_u,
                    where);
                worst_resolution = std::max(worst_resolution, res_u);

                // L(theta) = J(u - gamma sigma^2 theta) - p falls from
                // upper - p to lower - p and crosses zero once.
                const GridSearchSpec grid = demand_bracket(closed_i);
                const int n = 201;
                double prev = INFINITY;
                int crossings = 0;
                bool decreasing = true;
                double first = 0.0;
                double last = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double th = grid.theta_min + (grid.theta_max - grid.theta_min) * j / (n - 1);
                    const double l = k.mean(st.u_tilde - p.gamma * p.sigma_eps2 * th) - price;
                    if (j == 0) {
                        first = l;
                    } else {
                        decreasing = decreasing && l <= prev;
                        crossings += (prev > 0.0) != (l > 0.0) ? 1 : 0;
                    }
                    prev = l;
                    last = l;
                }
                sign.require(decreasing && crossings == 1 && first > 0.0 && last < 0.0, where);

                // Utility is negative everywhere and exactly -exp(-gamma D0)
                // with no position.
                p.D0 = draws.uniform(-2.0, 2.0);
                bool neg = utility_informed(0.0, price, st.u_tilde, range, p) ==
                           -std::exp(-p.gamma * p.D0);
                // At the bracket ends log(-U) can pass the exp overflow
                // point; a finite log(-U) is what makes U negative.
                const double max_log = std::log(std::numeric_limits<double>::max());
                for (double th : {grid.theta_min, closed_i, grid.theta_max}) {
                    const double li = log_neg_utility_informed(th, price, st.u_tilde, range, p);
                    const double lu = log_neg_utility_uninformed(th, price, range, c, p);
                    neg = neg && std::isfinite(li) && std::isfinite(lu);
                    if (std::abs(li) < max_log) {
                        neg = neg && utility_informed(th, price, st.u_tilde, range, p) < 0.0;
                    }
                    if (std::abs(lu) < max_log) {
                        neg = neg && utility_uninformed(th, price, range, c, p) < 0.0;
                    }
                }
                negative.require(neg, where);

                // D0 scales utility by exp(-gamma D0) and leaves the optimum.
                MarketParams p0 = p;
                p0.D0 = 0.0;
                const double th = closed_i + 0.5;
                const double with = log_neg_utility_informed(th, price, st.u_tilde, range, p);
                const double without = log_neg_utility_informed(th, price, st.u_tilde, range, p0);
                // Both sides round at the scale of log(-U) itself.
                endowment.add(std::abs(with - without + p.gamma * p.D0) /
                                  std::max({1.0, std::abs(p.gamma * p.D0), std::abs(without)}),
                              where);
                endowment.require(informed_utility_argmax(price, st.u_tilde, range, p) == arg_i,
                                  where);
            }
            std::vector<Check> out{informed.to_check(""), uninformed.to_check(""),
                                   maximizer.to_check(""), sign.to_check(""),
                                   negative.to_check(""), endowment.to_check("")};
            for (int j = 0; j < 3; ++j) {
                out[j].metrics["unit"] = "grid steps";
                out[j].metrics["worst_resolution"] = worst_resolution;
            }
            out[1].metrics["worst_gap"] = worst_uninformed_gap;
            return out;
        });
}

void equilibrium_suite(Runner& run, const VerifyOptions& o) {
    run.run_group({"equilibrium.coefficient_conditions", "equilibrium.clearing_with_range",
                   "equilibrium.clearing_baseline", "equilibrium.inverse_recovers_argument"},
                  [&] {
                      Draws draws(o.seed, kEquilibriumStream);
                      Tally coeffs(1e-8), with_range(1e-8), baseline(1e-8), inverse(1e-9);
                      for (int s = 0; s < o.param_sets; ++s) {
                          const MarketParams p = draws.params();
                          const EquilibriumCoefficients c = solve_coefficients(p);
                          coeffs.add(clearing_residuals(p, c).max_abs(),
                                     "set " + std::to_string(s));
                          for (int i = 0; i < o.states_per_set; ++i) {
                              const MarketState st = draws.state(p);
                              const double x = price_argument(c, st);
                              const Range range = draws.range_near(x, std::sqrt(p.sigma_eps2));
                              const TruncatedNormal k = make_kernel(p, range, o.kernel);
                              const double price = k.mean(x);
                              const std::string where =
                                  "set " + std::to_string(s) + " state " + std::to_string(i);
                              const Demands d{informed_demand(c, p, st),
                                              uninformed_demand(c, p, k, price)};
                              with_range.add(std::abs(clearing_gap(p, d, st)), where);
                              baseline.add(
                                  std::abs(clearing_gap(p, baseline_demands(c, p, st), st)), where);
                              inverse.add(std::abs(k.invert_mean(price) - x), where);
                          }
                      }
                      return std::vector<Check>{coeffs.to_check(""), with_range.to_check(""),
                                                baseline.to_check(""), inverse.to_check("")};
                  });
}

void statics_suite(Runner& run, const VerifyOptions& o) {
    const MarketParams base;
    const EquilibriumCoefficients c = solve_coefficients(base);

    // The parameter grids behind the price and liquidity curves.
    std::vector<std::pair<Range, SweepSpec>> grids;
    for (const Range& r : {Range{22.0, 28.0}, Range{23.0, 27.0}}) {
        SweepSpec u;
        grids.emplace_back(r, u);
        SweepSpec y;
        y.axis = "y_tilde";
        y.start = 22.0;
        y.stop = 33.0;
        y.steps = 111;
        grids.emplace_back(r, y);
    }
    run.run_group({"statics.signal_sensitivity_ordering", "statics.liquidity_ordering",
                   "statics.bound_sensitivities_positive", "statics.reaction_identity"},
                  [&] {
                      Tally order(0.0), liquidity(0.0), positive(0.0), identity(o.identity_tol);
                      for (const auto& [range, sweep] : grids) {
                          const TruncatedNormal k = make_kernel(base, range, o.kernel);
                          for (double v : sweep.values()) {
                              const MarketState st = sweep.state_at(v);
                              const std::string where = sweep.axis + " " + fmt(v);
                              const double s0 = sensitivity_to_signal_baseline(c);
                              const double s1 = sensitivity_to_signal_range(c, k, st);
                              order.require(0.0 < s1 && s1 < s0 && s0 < 1.0, where);
                              const double l0 = liquidity_baseline(c);
                              const double l1 = liquidity_range(c, k, st);
                              liquidity.require(0.0 < l0 && l0 < l1 && std::isfinite(l1), where);
                              const double move = sensitivity_to_range_move(c, k, st);
                              positive.require(0.0 < move && move < 1.0 &&
                                                   sensitivity_to_upper(c, k, st) > 0.0 &&
                                                   sensitivity_to_lower(c, k, st) > 0.0,
                                               where);
                              identity.add(std::abs(s1 / s0 + move - 1.0), where);
                          }
                      }
                      return std::vector<Check>{order.to_check(""), liquidity.to_check(""),
                                                positive.to_check(""), identity.to_check("")};
                  });

    run.run("statics.sensitivities_match_finite_difference", [&] {
        Draws draws(o.seed, kStaticsStream);
        Tally fd(o.fd_rel_tol);
        for (int i = 0; i < 50; ++i) {
            const MarketParams p = draws.params();
            const EquilibriumCoefficients cc = solve_coefficients(p);
            const MarketState st = draws.state(p);
            const double x = price_argument(cc, st);
            const double sd = std::sqrt(p.sigma_eps2);
            const Range range =
                Range::centered(x + draws.uniform(-1.0, 1.0) * sd, draws.uniform(1.0, 4.0) * sd);
            const TruncatedNormal k = make_kernel(p, range, o.kernel);
            const std::string where = "draw " + std::to_string(i);
            auto price_at = [&](Range r, MarketState s) {
                return price_with_range(cc, make_kernel(p, r, o.kernel), s);
            };
            // The kernel bends on the scale sd in X = tau u + alpha y + beta.
            fd.add(rel_err(five_point([&](double u) { return price_at(range, {u, st.y_tilde}); },
                                      st.u_tilde, sd / cc.tau),
                           sensitivity_to_signal_range(cc, k, st)),
                   where + " u");
            fd.add(rel_err(five_point([&](double y) { return price_at(range, {st.u_tilde, y}); },
                                      st.y_tilde, sd / std::abs(cc.alpha)),
                           1.0 / liquidity_range(cc, k, st)),
                   where + " y");
            fd.add(rel_err(five_point([&](double b) { return price_at({range.lower, b}, st); },
                                      range.upper, sd),
                           sensitivity_to_upper(cc, k, st)),
                   where + " upper");
            fd.add(rel_err(five_point([&](double b) { return price_at({b, range.upper}, st); },
                                      range.lower, sd),
                           sensitivity_to_lower(cc, k, st)),
                   where + " lower");
            fd.add(rel_err(five_point(
                               [&](double m) {
                                   return price_at(Range::centered(m, range.length()), st);
                               },
                               range.midpoint(), sd),
                           sensitivity_to_range_move(cc, k, st)),
                   where + " midpoint");
        }
        return fd.to_check("");
    });

    // The bound sensitivities die off as the bound moves away from X.
    const MarketState st{6.0, 10.0};
    const double x = price_argument(c, st);
    const double sd = std::sqrt(base.sigma_eps2);
    run.run("statics.upper_tail_decay", [&] {
        Tally t(0.0);
        double prev = INFINITY;
        for (int kk = 3; kk <= 37; ++kk) {
            const TruncatedNormal k = make_kernel(base, {x - 6.0 * sd, x + kk * sd}, o.kernel);
            const double v = sensitivity_to_upper(c, k, st);
            t.require(v > 0.0 && v < prev, "k " + std::to_string(kk));
            prev = v;
        }
        return t.to_check("");
    });
    run.run("statics.lower_tail_decay", [&] {
        Tally t(0.0);
        double prev = INFINITY;
        for (int kk = 3; kk <= 37; ++kk) {
            const TruncatedNormal k = make_kernel(base, {x - kk * sd, x + 6.0 * sd}, o.kernel);
            const double v = sensitivity_to_lower(c, k, st);
            t.require(v > 0.0 && v < prev, "k " + std::to_string(kk));
            prev = v;
        }
        return t.to_check("");
    });

    ProbeSettings settings;
    settings.target = o.probe_target;
    settings.kernel = o.kernel;
    const double length = 6.0;
    struct Far {
        const char* name;
        PriceProbe probe;
        Side side;
    };
    const Far far[] = {
        {"statics.signal_far_above", PriceProbe::SignalFar, Side::Above},
        {"statics.signal_far_below", PriceProbe::SignalFar, Side::Below},
        {"statics.upper_far", PriceProbe::UpperFar, Side::Above},
        {"statics.lower_far", PriceProbe::LowerFar, Side::Below},
        {"statics.range_move_far_above", PriceProbe::RangeMoveFar, Side::Above},
        {"statics.range_move_far_below", PriceProbe::RangeMoveFar, Side::Below},
        {"statics.liquidity_far_above", PriceProbe::LiquidityFar, Side::Above},
        {"statics.liquidity_far_below", PriceProbe::LiquidityFar, Side::Below},
        {"statics.range_dominates_far_above", PriceProbe::DriverFar, Side::Above},
        {"statics.range_dominates_far_below", PriceProbe::DriverFar, Side::Below},
    };
    for (const Far& f : far) {
        run.run(f.name, [&] {
            const std::vector<double> pts = default_far_points(c, base, f.side);
            return from_probe("", probe_price_limit(f.probe, f.side, c, base, st, length, pts,
                                                    settings));
        });
    }
    const std::vector<double> widths = geometric_sequence(4.0, 2.0, 64.0);
    run.run("statics.signal_wide", [&] {
        return from_probe("", probe_price_limit(PriceProbe::SignalWide, Side::Above, c, base, st,
                                                length, widths, settings));
    });
    run.run("statics.range_move_wide", [&] {
        return from_probe("", probe_price_limit(PriceProbe::RangeMoveWide, Side::Above, c, base,
                                                st, length, widths, settings));
    });

    run.run("statics.driver_classification", [&] {
        Tally t(0.0);
        const double combo = x - c.beta;
        const double far_d = default_far_points(c, base, Side::Above).front();
        const TruncatedNormal far_k =
            make_kernel(base, {combo + far_d * sd, combo + far_d * sd + length}, o.kernel);
        t.require(classify_dominant_driver(c, far_k, st) == DominantDriver::RangeDominates,
                  "far range");
        const TruncatedNormal wide_k = make_kernel(base, Range::centered(x, 64.0 * sd), o.kernel);
        t.require(classify_dominant_driver(c, wide_k, st) == DominantDriver::SignalDominates,
                  "wide range");
        // Place X where H = 1/(1 + tau) by bisection on the decreasing
        // flank of H above the midpoint.
        const TruncatedNormal k = make_kernel(base, {22.0, 28.0}, o.kernel);
        const double target = 1.0 / (1.0 + c.tau);
        double lo = 25.0;
        double hi = 40.0;
        for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) {
                break;
            }
            (k.slope(mid) > target ? lo : hi) = mid;
        }
        const MarketState tie{0.0, (lo - c.beta) / c.alpha};
        t.require(classify_dominant_driver(c, k, tie) == DominantDriver::Tie, "constructed tie");
        return t.to_check("");
    });
}

void premium_suite(Runner& run, const VerifyOptions& o) {
    run.run_group({"premium.baseline_identity", "premium.benchmark_signs"}, [&] {
        Draws draws(o.seed, kPremiumStream);
        Tally identity(o.identity_tol), signs(0.0);
        for (int s = 0; s < o.param_sets; ++s) {
            const MarketParams p = draws.params();
            const EquilibriumCoefficients c = solve_coefficients(p);
            const std::string where = "set " + std::to_string(s);
            identity.add(std::abs(premium_baseline(c, p.mu0) - (p.mu0 - c.B0)) /
                             std::max(1.0, std::abs(p.mu0) + std::abs(c.B0)),
                         where);
            for (const SignedDerivative& d : B0_comparative_statics(p)) {
                signs.require(d.sign_matches, where + " " + d.parameter);
            }
        }
        return std::vector<Check>{identity.to_check(""), signs.to_check("")};
    });

    run.run_group({"premium.neutral_midpoint", "premium.centered_symmetry",
                   "premium.higher_midpoint_reduces", "premium.lower_midpoint_raises"},
                  [&] {
                      Draws draws(o.seed + 1, kPremiumStream);
                      Tally neutral(0.0), symmetry(defaults::kPremiumZeroTol), reduces(0.0),
                          raises(0.0);
                      for (int s = 0; s < o.premium_sets; ++s) {
                          const MarketParams p = draws.params();
                          const EquilibriumCoefficients c = solve_coefficients(p);
                          const double sd = std::sqrt(p.sigma_eps2);
                          const double len = draws.uniform(2.0, 12.0) * sd;
                          const QuadratureSpec mc = QuadratureSpec::monte_carlo(
                              o.mc_samples, o.seed + static_cast<std::uint64_t>(s));
                          const std::string where = "set " + std::to_string(s);

                          const Range centered = Range::centered(c.B0, len);
                          const TruncatedNormal kc = make_kernel(p, centered, o.kernel);
                          const PremiumReport rc = premium_with_range(c, kc, p.mu0, mc);
                          neutral.require(std::abs(rc.delta) <=
                                                  std::max(defaults::kPremiumZeroTol,
                                                           3.0 * rc.standard_error) &&
                                              classify_by_midpoint(centered, c) ==
                                                  MidpointClass::Neutral,
                                          where);
                          symmetry.add(std::abs(premium_with_range(c, kc, p.mu0).delta), where);

                          const Range above = Range::centered(c.B0 + 5.0, len);
                          const PremiumReport ra =
                              premium_with_range(c, make_kernel(p, above, o.kernel), p.mu0, mc);
                          reduces.require(ra.delta < -3.0 * ra.standard_error &&
                                              classify_by_midpoint(above, c) ==
                                                  MidpointClass::Reduces,
                                          where);

                          const Range below = Range::centered(c.B0 - 5.0, len);
                          const PremiumReport rb =
                              premium_with_range(c, make_kernel(p, below, o.kernel), p.mu0, mc);
                          raises.require(rb.delta > 3.0 * rb.standard_error &&
                                             classify_by_midpoint(below, c) ==
                                                 MidpointClass::Raises,
                                         where);
                      }
                      return std::vector<Check>{neutral.to_check(""), symmetry.to_check(""),
                                                reduces.to_check(""), raises.to_check("")};
                  });

    run.run_group({"premium.higher_range_reduces", "premium.higher_bound_reduces",
                   "premium.midpoint_sensitivity_in_unit",
                   "premium.sensitivities_match_finite_difference"},
                  [&] {
                      Draws draws(o.seed + 2, kPremiumStream);
                      Tally shift(0.0), bound(0.0), unit(0.0), fd(o.fd_rel_tol);
                      for (int s = 0; s < o.param_sets; ++s) {
                          const MarketParams p = draws.params();
                          const EquilibriumCoefficients c = solve_coefficients(p);
                          const double sd = std::sqrt(p.sigma_eps2);
                          const Range r = Range::centered(
                              c.B0 + draws.uniform(-1.0, 1.0) * c.sigma_X(),
                              draws.uniform(1.0, 6.0) * std::max(sd, c.sigma_X()));
                          const std::string where = "set " + std::to_string(s);
                          auto delta = [&](Range rr) {
                              return premium_with_range(c, make_kernel(p, rr, o.kernel), p.mu0)
                                  .delta;
                          };
                          const double base = delta(r);
                          shift.require(delta(r.shifted(1.0)) < base, where);
                          bound.require(delta({r.lower, r.upper + 1.0}) < base, where + " upper");
                          bound.require(delta({r.lower + 0.25 * r.length(), r.upper}) < base,
                                        where + " lower");

                          const TruncatedNormal k = make_kernel(p, r, o.kernel);
                          const PremiumSensitivities ps = premium_sensitivities(c, k);
                          unit.require(-1.0 < ps.d_dmidpoint && ps.d_dmidpoint < 0.0, where);

                          fd.add(rel_err(five_point([&](double b) { return delta({r.lower, b}); },
                                                    r.upper, sd),
                                         ps.d_dupper),
                                 where + " upper");
                          fd.add(rel_err(five_point([&](double b) { return delta({b, r.upper}); },
                                                    r.lower, sd),
                                         ps.d_dlower),
                                 where + " lower");
                          fd.add(rel_err(five_point(
                                             [&](double m) {
                                                 return delta(Range::centered(m, r.length()));
                                             },
                                             r.midpoint(), sd),
                                         ps.d_dmidpoint),
                                 where + " midpoint");
                          // Shifting mu0 with Theta fixed moves the mean of
                          // X one for one; the mu0 term itself is excluded.
                          const double d_mean = five_point(
                              [&](double b0) {
                                  EquilibriumCoefficients cb = c;
                                  cb.B0 = b0;
                                  return premium_with_range(cb, k, p.mu0).delta;
                              },
                              c.B0, sd);
                          fd.add(rel_err(d_mean - 1.0, ps.d_dmu0), where + " mu0");
                      }
                      return std::vector<Check>{shift.to_check(""), bound.to_check(""),
                                                unit.to_check(""), fd.to_check("")};
                  });

    run.run("premium.monte_carlo_agrees_with_quadrature", [&] {
        const MarketParams p;
        const EquilibriumCoefficients c = solve_coefficients(p);
        Tally t(3.0);
        for (const Range& r : {Range{22.0, 28.0}, Range::centered(c.B0 + c.sigma_X(), 6.0)}) {
            const TruncatedNormal k = make_kernel(p, r, o.kernel);
            const PremiumReport mc =
                premium_with_range(c, k, p.mu0, QuadratureSpec::monte_carlo(o.mc_samples, o.seed));
            const double exact = premium_with_range(c, k, p.mu0).premium1;
            t.add(std::abs(mc.premium1 - exact) / mc.standard_error,
                  "[" + fmt(r.lower) + ", " + fmt(r.upper) + "]");
        }
        Check out = t.to_check("");
        out.metrics["unit"] = "standard errors";
        return out;
    });

    const MarketParams p;
    const EquilibriumCoefficients c = solve_coefficients(p);
    ProbeSettings settings;
    settings.target = o.probe_target;
    settings.kernel = o.kernel;
    const double length = 6.0;
    struct Far {
        const char* name;
        PremiumProbe probe;
        Side side;
    };
    const Far far[] = {
        {"premium.upper_far", PremiumProbe::UpperFar, Side::Above},
        {"premium.lower_far", PremiumProbe::LowerFar, Side::Below},
        {"premium.midpoint_far_above", PremiumProbe::MidpointFar, Side::Above},
        {"premium.midpoint_far_below", PremiumProbe::MidpointFar, Side::Below},
        {"premium.mu0_far_above", PremiumProbe::Mu0Far, Side::Above},
        {"premium.mu0_far_below", PremiumProbe::Mu0Far, Side::Below},
    };
    for (const Far& f : far) {
        run.run(f.name, [&] {
            const std::vector<double> pts = default_premium_far_points(c, p, f.side, o.probe_target);
            return from_probe("", probe_premium_limit(f.probe, f.side, c, p, length, pts, {},
                                                      settings));
        });
    }
    // Widths (in sigma_X) must cover B0 as well as mu0.
    const std::vector<double> widths =
        geometric_sequence(4.0, 2.0, 2.0 * std::abs(c.theta) / c.sigma_X() + 40.0);
    run.run("premium.delta_wide", [&] {
        return from_probe("", probe_premium_limit(PremiumProbe::DeltaWide, Side::Above, c, p,
                                                  length, widths, {}, settings));
    });
    run.run("premium.midpoint_wide", [&] {
        return from_probe("", probe_premium_limit(PremiumProbe::MidpointWide, Side::Above, c, p,
                                                  length, widths, {}, settings));
    });
}

}  // namespace

Verbosity parse_verbosity(const std::string& name) {
    if (name == "quiet") {
        return Verbosity::Quiet;
    }
    if (name == "normal") {
        return Verbosity::Normal;
    }
    if (name == "debug") {
        return Verbosity::Debug;
    }
    throw ConfigError("unknown verbosity '" + name + "' (quiet, normal, debug)");
}

std::size_t VerifyReport::failures() const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.passed; }));
}

const Check* VerifyReport::find(const std::string& name) const {
    for (const Check& c : checks) {
        if (c.name == name) {
            return &c;
        }
    }
    return nullptr;
}

ordered_json VerifyReport::to_json() const {
    ordered_json out;
    out["seed"] = seed;
    out["checks_run"] = checks.size();
    out["checks_failed"] = failures();
    ordered_json list = ordered_json::array();
    for (const Check& c : checks) {
        list.push_back({{"name", c.name},
                        {"status", c.passed ? "pass" : "fail"},
                        {"detail", c.detail},
                        {"metrics", c.metrics}});
    }
    out["checks"] = list;
    return out;
}

std::string VerifyReport::to_text(Verbosity v) const {
    std::ostringstream os;
    if (v != Verbosity::Quiet) {
        for (const Check& c : checks) {
            os << (c.passed ? "PASS  " : "FAIL  ") << c.name;
            if (!c.passed && !c.detail.empty()) {
                os << "  (" << c.detail << ")";
            }
            os << '\n';
            if (v == Verbosity::Debug) {
                os << "      " << c.metrics.dump() << '\n';
            }
        }
    }
    os << checks.size() << " checks, " << failures() << " failed (seed " << seed << ")\n";
    return os.str();
}

VerifyReport run_verify(const VerifyOptions& options) {
    VerifyReport report;
    report.seed = options.seed;
    Runner run(report);
    kernel_suite(run, options);
    demand_suite(run, options);
    equilibrium_suite(run, options);
    statics_suite(run, options);
    premium_suite(run, options);
    return report;
}

}  // namespace rangeeq::experiment
