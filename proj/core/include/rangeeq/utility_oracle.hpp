#pragma once

#include <functional>
#include <optional>

#include "rangeeq/equilibrium.hpp"
#include "rangeeq/truncnorm.hpp"

namespace rangeeq {

/// Grid for brute-force maximization over a demand bracket.
struct GridSearchSpec {
    double theta_min = -20.0;
    double theta_max = 20.0;
    int n_points = 1001;
    int refine_rounds = 2;

    /// Throws InvalidParameter for an empty bracket or fewer than 3 points.
    void validate() const;
    /// Grid spacing after the last refinement round.
    double resolution() const;
};

/// Default grid around an approximate demand: half-width
/// widen * 10 (1 + |center|).
GridSearchSpec demand_bracket(double center, double widen = 1.0);

/// log(-U) of the informed trader's conditional expected CARA utility at
/// demand theta. Finite for any finite inputs.
double log_neg_utility_informed(double theta, double price, double u_tilde, const Range& range,
                                const MarketParams& params);

/// Conditional expected utility of an informed trader; always negative.
double utility_informed(double theta, double price, double u_tilde, const Range& range,
                        const MarketParams& params);

/// Uninformed posterior mean of v given the price, before truncation.
double uninformed_posterior_mean(double price, const Range& range,
                                 const EquilibriumCoefficients& coef,
                                 const MarketParams& params);

double log_neg_utility_uninformed(double theta, double price, const Range& range,
                                  const EquilibriumCoefficients& coef,
                                  const MarketParams& params);

double utility_uninformed(double theta, double price, const Range& range,
                          const EquilibriumCoefficients& coef, const MarketParams& params);

/// Maximizer of f on the grid, refined by repeatedly zooming onto the two
/// cells around the best point and then by a parabola fitted through the
/// last grid around it. Throws BracketError if the best point of the first
/// pass lies on the bracket edge.
double argmax_utility(const std::function<double(double)>& f, const GridSearchSpec& spec);

/// Brute-force maximizer of the informed utility. Without an explicit
/// spec the bracket is centred on the closed-form demand with half-width
/// 10(1 + |demand|), and widened tenfold once if the optimum hits an edge.
/// D0 only scales utility, so the search leaves it out and the result does
/// not depend on it.
double informed_utility_argmax(double price, double u_tilde, const Range& range,
                               const MarketParams& params,
                               std::optional<GridSearchSpec> spec = std::nullopt);

double uninformed_utility_argmax(double price, const Range& range,
                                 const EquilibriumCoefficients& coef, const MarketParams& params,
                                 std::optional<GridSearchSpec> spec = std::nullopt);

/// Exact maximizer of the uninformed utility: the root of its first-order
/// condition, which truncates at the posterior scale sigma_eta.
double uninformed_utility_maximizer(double price, const Range& range,
                                    const EquilibriumCoefficients& coef,
                                    const MarketParams& params);

}  // namespace rangeeq
