#include "rangeeq/utility_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "rangeeq/errors.hpp"
#include "rangeeq/normal_tail.hpp"

namespace rangeeq {

namespace {

constexpr std::size_t kVertexHalfWidth = 50;

// log(-E[-exp(-gamma (D0 + theta (v - p))) | v in range]) for
// v ~ N(center, sd^2). Completing the square moves the exponential into
// a shift of the normal, leaving a ratio of interval masses.
double log_neg_cara(double theta, double price, double center, double sd, const Range& range,
                    double gamma, double D0) {
    const double var = sd * sd;
    const double shift = gamma * var * theta;
    const double width = range.length() / sd;
    const double lo0 = (range.lower - center) / sd;
    const double hi0 = (range.upper - center) / sd;
    const double lo = (range.lower + shift - center) / sd;
    const double hi = (range.upper + shift - center) / sd;
    const double shifted = normal::interval_moments(lo, hi, width).log_mass;
    const double base = normal::interval_moments(lo0, hi0, width).log_mass;
    // Both log masses can be in the thousands when the range sits far from
    // the center; take their difference before adding the small terms.
    const double mass_ratio = shifted - base;
    return -gamma * D0 + gamma * (price - center) * theta + 0.5 * gamma * shift * theta +
           mass_ratio;
}

double search_around(const std::function<double(double)>& f, double center,
                     std::optional<GridSearchSpec> spec) {
    if (spec) {
        return argmax_utility(f, *spec);
    }
    try {
        return argmax_utility(f, demand_bracket(center));
    } catch (const BracketError&) {
        return argmax_utility(f, demand_bracket(center, 10.0));
    }
}

// Near a flat maximum neighbouring grid values can differ by less than
// their rounding, which leaves the best point a step or more off. The
// vertex of a least-squares parabola through the points around it averages
// that out. Returns the offset from values[best] in grid steps, or 0 when
// the fit has no maximum well inside the fitted window.
double parabola_vertex(const std::vector<double>& values, std::size_t best) {
    const std::size_t m = std::min<std::size_t>({kVertexHalfWidth, best, values.size() - 1 - best});
    if (m < 2) {
        return 0.0;
    }
    double s0 = 0.0, s2 = 0.0, s4 = 0.0, f0 = 0.0, f1 = 0.0, f2 = 0.0;
    for (std::size_t i = best - m; i <= best + m; ++i) {
        const double t = static_cast<double>(i) - static_cast<double>(best);
        const double v = values[i] - values[best];
        s0 += 1.0;
        s2 += t * t;
        s4 += t * t * t * t;
        f0 += v;
        f1 += t * v;
        f2 += t * t * v;
    }
    const double slope = f1 / s2;
    const double curvature = (s0 * f2 - s2 * f0) / (s0 * s4 - s2 * s2);
    if (!(curvature < 0.0)) {
        return 0.0;
    }
    const double offset = -slope / (2.0 * curvature);
    return std::abs(offset) <= 0.5 * static_cast<double>(m) ? offset : 0.0;
}

}  // namespace

GridSearchSpec demand_bracket(double center, double widen) {
    const double half = widen * 10.0 * (1.0 + std::abs(center));
    GridSearchSpec grid;
    grid.theta_min = center - half;
    grid.theta_max = center + half;
    return grid;
}

void GridSearchSpec::validate() const {
    if (!std::isfinite(theta_min) || !std::isfinite(theta_max) || !(theta_min < theta_max)) {
        throw InvalidParameter("grid bracket must satisfy theta_min < theta_max");
    }
    if (n_points < 3) {
        throw InvalidParameter("grid needs at least 3 points");
    }
    if (refine_rounds < 0) {
        throw InvalidParameter("refine_rounds must be non-negative");
    }
}

double GridSearchSpec::resolution() const {
    double h = (theta_max - theta_min) / (n_points - 1);
    for (int r = 0; r < refine_rounds; ++r) {
        h = 2.0 * h / (n_points - 1);
    }
    return h;
}

double log_neg_utility_informed(double theta, double price, double u_tilde, const Range& range,
                                const MarketParams& params) {
    return log_neg_cara(theta, price, u_tilde, std::sqrt(params.sigma_eps2), range, params.gamma,
                        params.D0);
}

double utility_informed(double theta, double price, double u_tilde, const Range& range,
                        const MarketParams& params) {
    return -std::exp(log_neg_utility_informed(theta, price, u_tilde, range, params));
}

double uninformed_posterior_mean(double price, const Range& range,
                                 const EquilibriumCoefficients& coef,
                                 const MarketParams& params) {
    const double x = make_kernel(params, range).invert_mean(price);
    return coef.omega1 * params.mu0 + coef.omega2 * (x - coef.beta) / coef.tau;
}

double log_neg_utility_uninformed(double theta, double price, const Range& range,
                                  const EquilibriumCoefficients& coef,
                                  const MarketParams& params) {
    const double mean = uninformed_posterior_mean(price, range, coef, params);
    return log_neg_cara(theta, price, mean, coef.sigma_eta(), range, params.gamma, params.D0);
}

double utility_uninformed(double theta, double price, const Range& range,
                          const EquilibriumCoefficients& coef, const MarketParams& params) {
    return -std::exp(log_neg_utility_uninformed(theta, price, range, coef, params));
}

double argmax_utility(const std::function<double(double)>& f, const GridSearchSpec& spec) {
    spec.validate();
    const auto n = static_cast<std::size_t>(spec.n_points);
    double lo = spec.theta_min;
    double hi = spec.theta_max;
    double best_x = lo;
    double h = 0.0;
    std::size_t best_i = 0;
    std::vector<double> values(n);
    for (int round = 0; round <= spec.refine_rounds; ++round) {
        h = (hi - lo) / static_cast<double>(n - 1);
        best_i = 0;
        double best_f = -INFINITY;
        for (std::size_t i = 0; i < n; ++i) {
            values[i] = f(lo + h * static_cast<double>(i));
            if (values[i] > best_f) {
                best_f = values[i];
                best_i = i;
            }
        }
        if (round == 0 && (best_i == 0 || best_i == n - 1)) {
            throw BracketError("maximum at the edge of [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "]");
        }
        best_x = lo + h * static_cast<double>(best_i);
        lo = best_x - h;
        hi = best_x + h;
    }
    return best_x + h * parabola_vertex(values, best_i);
}

double informed_utility_argmax(double price, double u_tilde, const Range& range,
                               const MarketParams& params, std::optional<GridSearchSpec> spec) {
    const double guess = informed_demand_at_price(make_kernel(params, range), params, u_tilde, price);
    auto f = [&](double theta) {
        return -log_neg_cara(theta, price, u_tilde, std::sqrt(params.sigma_eps2), range,
                             params.gamma, 0.0);
    };
    return search_around(f, guess, spec);
}

double uninformed_utility_argmax(double price, const Range& range,
                                 const EquilibriumCoefficients& coef, const MarketParams& params,
                                 std::optional<GridSearchSpec> spec) {
    const double guess = uninformed_demand(coef, params, make_kernel(params, range), price);
    const double mean = uninformed_posterior_mean(price, range, coef, params);
    const double sd = coef.sigma_eta();
    auto f = [&](double theta) {
        return -log_neg_cara(theta, price, mean, sd, range, params.gamma, 0.0);
    };
    return search_around(f, guess, spec);
}

double uninformed_utility_maximizer(double price, const Range& range,
                                    const EquilibriumCoefficients& coef,
                                    const MarketParams& params) {
    const double mean = uninformed_posterior_mean(price, range, coef, params);
    const TruncatedNormal posterior(range, NoiseScale::from_variance(coef.sigma_eta2));
    return (mean - posterior.invert_mean(price)) / (params.gamma * coef.sigma_eta2);
}

}  // namespace rangeeq
