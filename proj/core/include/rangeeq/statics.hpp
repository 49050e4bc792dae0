#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rangeeq/equilibrium.hpp"
#include "rangeeq/tolerances.hpp"
#include "rangeeq/truncnorm.hpp"

namespace rangeeq {

/// Distances from the signal-noise combination tau*u + alpha*y (without
/// the intercept) to the disclosed range.
struct Distances {
    double d = 0.0;        // 0 when the combination lies inside the range
    double d_upper = 0.0;  // |upper - combination|
    double d_lower = 0.0;  // |combination - lower|
};

Distances compute_distances(const EquilibriumCoefficients& coef, const Range& range,
                            const MarketState& state);

/// dp/du without disclosure: tau.
double sensitivity_to_signal_baseline(const EquilibriumCoefficients& coef);
/// dp/du with disclosure: tau * H(X).
double sensitivity_to_signal_range(const EquilibriumCoefficients& coef,
                                   const TruncatedNormal& kernel, const MarketState& state);
double sensitivity_to_upper(const EquilibriumCoefficients& coef, const TruncatedNormal& kernel,
                            const MarketState& state);
double sensitivity_to_lower(const EquilibriumCoefficients& coef, const TruncatedNormal& kernel,
                            const MarketState& state);
/// dp/d(midpoint) at fixed length: 1 - H(X).
double sensitivity_to_range_move(const EquilibriumCoefficients& coef,
                                 const TruncatedNormal& kernel, const MarketState& state);

/// (dp/dy)^-1 without disclosure: 1/alpha.
double liquidity_baseline(const EquilibriumCoefficients& coef);
/// (dp/dy)^-1 with disclosure: 1/(alpha H(X)).
double liquidity_range(const EquilibriumCoefficients& coef, const TruncatedNormal& kernel,
                       const MarketState& state);

enum class DominantDriver { SignalDominates, RangeDominates, Tie };

/// Which of a unit move in the signal or in the range moves the price more:
/// compares H(X) with 1/(1 + tau).
DominantDriver classify_dominant_driver(const EquilibriumCoefficients& coef,
                                        const TruncatedNormal& kernel, const MarketState& state,
                                        double tol = defaults::kDriverTieTol);

const char* to_string(DominantDriver d);

/// Settings for judging a probe sequence.
struct ProbeSettings {
    double target = defaults::kProbeTarget;
    // Residuals at or below this level count as converged noise and are
    // exempt from the strict-decrease requirement.
    double noise_floor = defaults::kProbeNoiseFloor;
    // Kernel settings for the ranges a probe builds.
    KernelConfig kernel{};
};

/// Values of a quantity along a probe sequence and their deviations from
/// the claimed limit.
struct ProbeReport {
    std::string name;
    double limit = 0.0;
    std::vector<double> points;
    std::vector<double> values;
    std::vector<double> residuals;
    bool monotone = false;   // every residual below the previous (or at the floor)
    bool converged = false;  // terminal residual <= target
    std::string message;     // empty when both hold

    bool passed() const { return monotone && converged; }
    double terminal_residual() const { return residuals.empty() ? 0.0 : residuals.back(); }
};

/// Evaluates `quantity` at each point and judges the residuals
/// |value - limit| (or `deviation(value)` when given).
ProbeReport limit_probe(std::string name, std::span<const double> points,
                        const std::function<double(double)>& quantity, double limit,
                        const ProbeSettings& settings = {},
                        const std::function<double(double)>& deviation = nullptr);

/// start, start*ratio, ... up to and including the first point >= stop.
std::vector<double> geometric_sequence(double start, double ratio, double stop);

/// Price-statics limits. Points are distances or widths in units of
/// sigma_eps.
enum class PriceProbe {
    SignalFar,      // tau*H -> 0 as the combination leaves the range
    UpperFar,       // dp/d(upper) -> 0 as the upper bound rises away
    LowerFar,       // dp/d(lower) -> 0 as the lower bound falls away
    RangeMoveFar,   // 1 - H -> 1 as the combination leaves the range
    LiquidityFar,   // 1/(alpha H) -> infinity; residual is alpha*H
    DriverFar,      // max(tau*H, H) -> 0: range moves dominate far away
    SignalWide,     // tau*H -> tau as the range widens around X
    RangeMoveWide,  // 1 - H -> 0 as the range widens around X
};

enum class Side { Above, Below };

const char* to_string(PriceProbe p);

/// Builds the range for each probe point and reports convergence.
///
/// Far probes keep the range length fixed and place the range (or the
/// moving bound) `point` sigmas above or below the combination
/// tau*u + alpha*y; the fixed bound of UpperFar/LowerFar sits `length`
/// below/above X. Wide probes centre a range of width `point` sigmas on X.
ProbeReport probe_price_limit(PriceProbe probe, Side side, const EquilibriumCoefficients& coef,
                              const MarketParams& params, const MarketState& state,
                              double length, std::span<const double> points,
                              const ProbeSettings& settings = {});

/// Geometric far-probe distances (sigma units) starting 5 sigma past the
/// intercept so that X itself is already outside the range, and running
/// to `stop` sigmas.
std::vector<double> default_far_points(const EquilibriumCoefficients& coef,
                                       const MarketParams& params, Side side,
                                       double stop = 1e5);

}  // namespace rangeeq
