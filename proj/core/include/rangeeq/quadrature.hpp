#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rangeeq/tolerances.hpp"

namespace rangeeq::quad {

/// Gauss-Hermite rule for the weight exp(-x^2) (physicists' convention).
struct HermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes from the Jacobi-matrix eigenvalues, polished by Newton on the
/// orthonormal recurrence. Outer weights that underflow are returned as 0.
HermiteRule gauss_hermite(std::size_t n);

/// Result of an expectation over a normal variable.
struct Estimate {
    double value = 0.0;
    double standard_error = 0.0;  // 0 for deterministic rules
    bool flagged = false;         // sampling error above target
};

using Integrand = std::function<double(double)>;

/// E[f(X)], X ~ N(mean, sd^2), by a fixed Hermite rule.
double expect_hermite(const Integrand& f, double mean, double sd, const HermiteRule& rule);

/// E[f(X)] by adaptive Gauss-Kronrod over standardized z in [-38, 38],
/// split at the given breakpoints (in X units) where f changes shape. The
/// error target is the larger of rel_tol times the integral of |f| and
/// abs_tol.
double expect_adaptive(const Integrand& f, double mean, double sd,
                       std::span<const double> breakpoints,
                       double rel_tol = defaults::kAdaptiveRelTol,
                       double abs_tol = defaults::kAdaptiveAbsTol,
                       unsigned max_depth = defaults::kAdaptiveMaxDepth);

/// E[f(X)] by antithetic Monte Carlo. Draws are generated in fixed blocks,
/// each from its own generator seeded by (seed, block index), so the result
/// depends only on (seed, samples). The standard error comes from the
/// spread of antithetic pair means.
Estimate expect_monte_carlo(const Integrand& f, double mean, double sd, std::size_t samples,
                            std::uint64_t seed, double target_se);

}  // namespace rangeeq::quad
