#include "rangeeq/statics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rangeeq/errors.hpp"

namespace rangeeq {

Distances compute_distances(const EquilibriumCoefficients& coef, const Range& range,
                            const MarketState& state) {
    const double x = coef.tau * state.u_tilde + coef.alpha * state.y_tilde;
    Distances out;
    out.d_upper = std::abs(range.upper - x);
    out.d_lower = std::abs(x - range.lower);
    if (x > range.upper) {
        out.d = x - range.upper;
    } else if (x < range.lower) {
        out.d = range.lower - x;
    }
    return out;
}

double sensitivity_to_signal_baseline(const EquilibriumCoefficients& coef) { return coef.tau; }

double sensitivity_to_signal_range(const EquilibriumCoefficients& coef,
                                   const TruncatedNormal& kernel, const MarketState& state) {
    return coef.tau * kernel.slope(price_argument(coef, state));
}

double sensitivity_to_upper(const EquilibriumCoefficients& coef, const TruncatedNormal& kernel,
                            const MarketState& state) {
    return kernel.mean_d_upper(price_argument(coef, state));
}

double sensitivity_to_lower(const EquilibriumCoefficients& coef, const TruncatedNormal& kernel,
                            const MarketState& state) {
    return kernel.mean_d_lower(price_argument(coef, state));
}

double sensitivity_to_range_move(const EquilibriumCoefficients& coef,
                                 const TruncatedNormal& kernel, const MarketState& state) {
    return kernel.slope_complement(price_argument(coef, state));
}

double liquidity_baseline(const EquilibriumCoefficients& coef) { return 1.0 / coef.alpha; }

double liquidity_range(const EquilibriumCoefficients& coef, const TruncatedNormal& kernel,
                       const MarketState& state) {
    return 1.0 / (coef.alpha * kernel.slope(price_argument(coef, state)));
}

DominantDriver classify_dominant_driver(const EquilibriumCoefficients& coef,
                                        const TruncatedNormal& kernel, const MarketState& state,
                                        double tol) {
    const double h = kernel.slope(price_argument(coef, state));
    const double threshold = 1.0 / (1.0 + coef.tau);
    if (std::abs(h - threshold) <= tol) {
        return DominantDriver::Tie;
    }
    return h < threshold ? DominantDriver::RangeDominates : DominantDriver::SignalDominates;
}

const char* to_string(DominantDriver d) {
    switch (d) {
    case DominantDriver::SignalDominates:
        return "signal";
    case DominantDriver::RangeDominates:
        return "range";
    case DominantDriver::Tie:
        return "tie";
    }
    return "?";
}

ProbeReport limit_probe(std::string name, std::span<const double> points,
                        const std::function<double(double)>& quantity, double limit,
                        const ProbeSettings& settings,
                        const std::function<double(double)>& deviation) {
    ProbeReport r;
    r.name = std::move(name);
    r.limit = limit;
    r.points.assign(points.begin(), points.end());
    for (double p : points) {
        const double v = quantity(p);
        r.values.push_back(v);
        r.residuals.push_back(deviation ? deviation(v) : std::abs(v - limit));
    }
    r.monotone = true;
    std::ostringstream msg;
    for (std::size_t k = 1; k < r.residuals.size(); ++k) {
        const double cur = r.residuals[k];
        if (!std::isfinite(cur) || (cur >= r.residuals[k - 1] && cur > settings.noise_floor)) {
            r.monotone = false;
            msg << "residual rose from " << r.residuals[k - 1] << " to " << cur << " at point "
                << r.points[k] << "; ";
            break;
        }
    }
    r.converged = !r.residuals.empty() && std::isfinite(r.residuals.back()) &&
                  r.residuals.back() <= settings.target;
    if (!r.converged) {
        msg << "terminal residual " << r.terminal_residual() << " above target "
            << settings.target;
    }
    r.message = msg.str();
    return r;
}

std::vector<double> geometric_sequence(double start, double ratio, double stop) {
    if (!(start > 0.0) || !(ratio > 1.0) || !std::isfinite(stop)) {
        throw InvalidParameter("geometric sequence needs start > 0 and ratio > 1");
    }
    std::vector<double> out;
    double x = start;
    for (;;) {
        out.push_back(x);
        if (x >= stop) {
            break;
        }
        x *= ratio;
    }
    return out;
}

const char* to_string(PriceProbe p) {
    switch (p) {
    case PriceProbe::SignalFar:
        return "signal_far";
    case PriceProbe::UpperFar:
        return "upper_far";
    case PriceProbe::LowerFar:
        return "lower_far";
    case PriceProbe::RangeMoveFar:
        return "range_move_far";
    case PriceProbe::LiquidityFar:
        return "liquidity_far";
    case PriceProbe::DriverFar:
        return "driver_far";
    case PriceProbe::SignalWide:
        return "signal_wide";
    case PriceProbe::RangeMoveWide:
        return "range_move_wide";
    }
    return "?";
}

ProbeReport probe_price_limit(PriceProbe probe, Side side, const EquilibriumCoefficients& coef,
                              const MarketParams& params, const MarketState& state,
                              double length, std::span<const double> points,
                              const ProbeSettings& settings) {
    const NoiseScale noise = params.noise();
    const double s = noise.sd();
    const double combo = coef.tau * state.u_tilde + coef.alpha * state.y_tilde;
    const double x = combo + coef.beta;

    auto far_range = [&](double d) {
        return side == Side::Above ? Range{combo + d * s, combo + d * s + length}
                                   : Range{combo - d * s - length, combo - d * s};
    };
    auto at = [&](Range r) { return TruncatedNormal(r, noise, settings.kernel).at(x); };

    std::function<double(double)> quantity;
    std::function<double(double)> deviation;
    double limit = 0.0;
    switch (probe) {
    case PriceProbe::SignalFar:
        quantity = [&](double d) { return coef.tau * at(far_range(d)).slope; };
        break;
    case PriceProbe::UpperFar:
        quantity = [&](double d) { return at(Range{x - length, combo + d * s}).d_upper; };
        break;
    case PriceProbe::LowerFar:
        quantity = [&](double d) { return at(Range{combo - d * s, x + length}).d_lower; };
        break;
    case PriceProbe::RangeMoveFar:
        quantity = [&](double d) { return at(far_range(d)).slope_complement; };
        limit = 1.0;
        break;
    case PriceProbe::LiquidityFar:
        quantity = [&](double d) { return 1.0 / (coef.alpha * at(far_range(d)).slope); };
        limit = INFINITY;
        deviation = [](double v) { return 1.0 / v; };
        break;
    case PriceProbe::DriverFar:
        // Signal effect minus range effect: (1 + tau) H - 1 -> -1.
        quantity = [&](double d) { return (1.0 + coef.tau) * at(far_range(d)).slope - 1.0; };
        limit = -1.0;
        break;
    case PriceProbe::SignalWide:
        quantity = [&](double w) { return coef.tau * at(Range::centered(x, w * s)).slope; };
        limit = coef.tau;
        break;
    case PriceProbe::RangeMoveWide:
        quantity = [&](double w) { return at(Range::centered(x, w * s)).slope_complement; };
        break;
    }
    return limit_probe(to_string(probe), points, quantity, limit, settings, deviation);
}

std::vector<double> default_far_points(const EquilibriumCoefficients& coef,
                                       const MarketParams& params, Side side, double stop) {
    const double s = std::sqrt(params.sigma_eps2);
    const double offset = side == Side::Above ? coef.beta / s : -coef.beta / s;
    return geometric_sequence(5.0 + std::max(0.0, offset), 2.0, stop);
}

}  // namespace rangeeq
