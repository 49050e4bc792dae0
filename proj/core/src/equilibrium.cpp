#include "rangeeq/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rangeeq/errors.hpp"

namespace rangeeq {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw InvalidParameter(what);
    }
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void MarketParams::validate() const {
    require(positive(gamma), "gamma must be positive");
    require(positive(sigma_u2), "sigma_u2 must be positive");
    require(positive(sigma_eps2), "sigma_eps2 must be positive");
    require(positive(sigma_y2), "sigma_y2 must be positive");
    require(std::isfinite(x_I) && x_I > 0.0 && x_I < 1.0, "x_I must lie strictly inside (0, 1)");
    require(std::isfinite(mu0), "mu0 must be finite");
    require(std::isfinite(Z), "Z must be finite");
    require(std::isfinite(D0), "D0 must be finite");
}

double EquilibriumCoefficients::sigma_X() const { return std::sqrt(sigma_X2); }
double EquilibriumCoefficients::sigma_eta() const { return std::sqrt(sigma_eta2); }

double ClearingResiduals::max_abs() const {
    return std::max({std::abs(signal), std::abs(noise), std::abs(intercept)});
}

EquilibriumCoefficients solve_coefficients(const MarketParams& params) {
    params.validate();
    const double g = params.gamma;
    const double se2 = params.sigma_eps2;
    const double su2 = params.sigma_u2;
    const double sy2 = params.sigma_y2;
    const double xI = params.x_I;
    const double xU = params.x_U();

    EquilibriumCoefficients c;
    const double denom = 1.0 + xI * xI * su2 / (g * g * se2 * se2 * sy2) + xI * su2 / se2;
    c.tau = 1.0 - xU / denom;
    // alpha/tau is the noise-to-signal loading of the price.
    const double k = g * se2 / xI;
    c.alpha = k * c.tau;
    const double noise_var = k * k * sy2;
    c.omega1 = noise_var / (su2 + noise_var);
    c.omega2 = su2 / (su2 + noise_var);
    c.sigma_eta2 = se2 + c.omega1 * su2;
    const double uninformed_weight = xU / (g * c.sigma_eta2);
    const double informed_weight = xI / (g * se2);
    c.beta = (uninformed_weight * c.omega1 * params.mu0 - params.Z) /
             (uninformed_weight + informed_weight);
    c.B0 = c.beta + params.mu0 * c.tau;
    c.sigma_X2 = c.tau * c.tau * su2 + c.alpha * c.alpha * sy2;
    c.theta = c.B0 - params.mu0;
    return c;
}

ClearingResiduals clearing_residuals(const MarketParams& params,
                                     const EquilibriumCoefficients& c) {
    const double g = params.gamma;
    const double informed_weight = params.x_I / (g * params.sigma_eps2);
    const double uninformed_weight = params.x_U() / (g * c.sigma_eta2);
    const double lean = c.omega2 / c.tau - 1.0;
    ClearingResiduals r;
    r.signal = informed_weight * (1.0 - c.tau) + uninformed_weight * c.tau * lean;
    r.noise = -c.alpha * informed_weight + uninformed_weight * c.alpha * lean + 1.0;
    r.intercept = -c.beta * informed_weight +
                  uninformed_weight * (c.omega1 * params.mu0 - c.beta) - params.Z;
    return r;
}

TruncatedNormal make_kernel(const MarketParams& params, Range range, const KernelConfig& config) {
    return TruncatedNormal(range, params.noise(), config);
}

double price_argument(const EquilibriumCoefficients& coef, const MarketState& state) {
    return coef.tau * state.u_tilde + coef.alpha * state.y_tilde + coef.beta;
}

double price_with_range(const EquilibriumCoefficients& coef, const TruncatedNormal& kernel,
                        const MarketState& state) {
    return kernel.mean(price_argument(coef, state));
}

double price_baseline(const EquilibriumCoefficients& coef, const MarketState& state) {
    return price_argument(coef, state);
}

double informed_demand(const EquilibriumCoefficients& coef, const MarketParams& params,
                       const MarketState& state) {
    return ((1.0 - coef.tau) * state.u_tilde - coef.alpha * state.y_tilde - coef.beta) /
           (params.gamma * params.sigma_eps2);
}

double informed_demand_at_price(const TruncatedNormal& kernel, const MarketParams& params,
                                double u_tilde, double price) {
    return (u_tilde - kernel.invert_mean(price)) / (params.gamma * params.sigma_eps2);
}

namespace {

// Uninformed demand once the price argument X has been recovered.
double uninformed_from_argument(const EquilibriumCoefficients& c, const MarketParams& params,
                                double x) {
    const double ratio = c.omega2 / c.tau;
    return (c.omega1 * params.mu0 - ratio * c.beta + (ratio - 1.0) * x) /
           (params.gamma * c.sigma_eta2);
}

}  // namespace

double uninformed_demand(const EquilibriumCoefficients& coef, const MarketParams& params,
                         const TruncatedNormal& kernel, double price) {
    return uninformed_from_argument(coef, params, kernel.invert_mean(price));
}

Demands baseline_demands(const EquilibriumCoefficients& coef, const MarketParams& params,
                         const MarketState& state) {
    const double p0 = price_baseline(coef, state);
    Demands d;
    d.informed = (state.u_tilde - p0) / (params.gamma * params.sigma_eps2);
    d.uninformed = uninformed_from_argument(coef, params, p0);
    return d;
}

double clearing_gap(const MarketParams& params, const Demands& demands,
                    const MarketState& state) {
    return params.x_I * demands.informed + params.x_U() * demands.uninformed +
           state.y_tilde - params.Z;
}

}  // namespace rangeeq
