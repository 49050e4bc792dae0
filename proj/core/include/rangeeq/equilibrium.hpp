#pragma once

#include "rangeeq/tolerances.hpp"
#include "rangeeq/truncnorm.hpp"

namespace rangeeq {

/// Exogenous market parameters.
///
/// The uninformed fraction is always 1 - x_I; it is not stored.
struct MarketParams {
    double gamma = 3.0;       // absolute risk aversion
    double mu0 = 25.0;        // unconditional mean of the fundamental u
    double sigma_u2 = 6.0;    // variance of u
    double sigma_eps2 = 1.0;  // variance of the signal noise, v = u + eps
    double sigma_y2 = 5.0;    // variance of noise-trader volume
    double x_I = 0.4;         // informed fraction, strictly inside (0, 1)
    double Z = 25.0;          // supply of the risky asset
    double D0 = 0.0;          // bond endowment; scales utility only

    double x_U() const { return 1.0 - x_I; }
    NoiseScale noise() const { return NoiseScale::from_variance(sigma_eps2); }

    /// Throws InvalidParameter when the setup is violated.
    void validate() const;

    bool operator==(const MarketParams&) const = default;
};

/// Coefficients of the price map p = J(tau*u + alpha*y + beta) and the
/// quantities derived from them.
struct EquilibriumCoefficients {
    double tau = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    // Weights of the uninformed posterior mean on mu0 and on the signal
    // recovered from the price; omega1 + omega2 = 1.
    double omega1 = 0.0;
    double omega2 = 0.0;
    double sigma_eta2 = 0.0;  // uninformed posterior variance of v
    double B0 = 0.0;          // mean of X = tau*u + alpha*y + beta
    double sigma_X2 = 0.0;    // variance of X
    double theta = 0.0;       // B0 - mu0

    double sigma_X() const;
    double sigma_eta() const;
};

/// Realized signal and noise volume.
struct MarketState {
    double u_tilde = 0.0;
    double y_tilde = 0.0;

    bool operator==(const MarketState&) const = default;
};

/// Residuals of the three coefficient-matching conditions of market
/// clearing (signal, noise volume and constant terms).
struct ClearingResiduals {
    double signal = 0.0;
    double noise = 0.0;
    double intercept = 0.0;

    double max_abs() const;
};

struct Demands {
    double informed = 0.0;
    double uninformed = 0.0;
};

EquilibriumCoefficients solve_coefficients(const MarketParams& params);

ClearingResiduals clearing_residuals(const MarketParams& params,
                                     const EquilibriumCoefficients& coef);

/// Kernel for the disclosed range at the signal-noise scale of `params`.
TruncatedNormal make_kernel(const MarketParams& params, Range range,
                            const KernelConfig& config = {});

/// X = tau*u + alpha*y + beta, the argument of the price map. It is also
/// the price without disclosure.
double price_argument(const EquilibriumCoefficients& coef, const MarketState& state);

double price_with_range(const EquilibriumCoefficients& coef, const TruncatedNormal& kernel,
                        const MarketState& state);

double price_baseline(const EquilibriumCoefficients& coef, const MarketState& state);

/// Informed demand written in terms of the state.
double informed_demand(const EquilibriumCoefficients& coef, const MarketParams& params,
                       const MarketState& state);

/// Informed demand written in terms of the observed price.
double informed_demand_at_price(const TruncatedNormal& kernel, const MarketParams& params,
                                double u_tilde, double price);

/// Closed-form uninformed demand at a price inside the range. Throws
/// OutOfImageError otherwise.
double uninformed_demand(const EquilibriumCoefficients& coef, const MarketParams& params,
                         const TruncatedNormal& kernel, double price);

/// Both demands without disclosure, at the baseline price.
Demands baseline_demands(const EquilibriumCoefficients& coef, const MarketParams& params,
                         const MarketState& state);

/// x_I*theta_I + x_U*theta_U + y - Z.
double clearing_gap(const MarketParams& params, const Demands& demands,
                    const MarketState& state);

}  // namespace rangeeq
