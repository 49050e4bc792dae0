#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rangeeq/equilibrium.hpp"
#include "rangeeq/statics.hpp"
#include "rangeeq/tolerances.hpp"
#include "rangeeq/truncnorm.hpp"

namespace rangeeq {

enum class QuadratureMethod { Adaptive, GaussHermite, MonteCarlo };

const char* to_string(QuadratureMethod m);

/// How expectations over X ~ N(B0, sigma_X^2) are computed.
struct QuadratureSpec {
    QuadratureMethod method = QuadratureMethod::Adaptive;
    // Hermite nodes or Monte Carlo samples; 0 selects the method default.
    std::size_t nodes_or_samples = 0;
    std::uint64_t seed = 42;
    double target_se = defaults::kMonteCarloTargetSe;

    /// Throws InvalidParameter below the minimum node or sample count.
    void validate() const;
    std::size_t resolved_count() const;

    static QuadratureSpec hermite(std::size_t nodes = defaults::kHermiteNodes);
    static QuadratureSpec monte_carlo(std::size_t samples = defaults::kMonteCarloSamples,
                                      std::uint64_t seed = 42);

    bool operator==(const QuadratureSpec&) const = default;
};

enum class SignClass { Positive, Zero, Negative };
const char* to_string(SignClass s);

struct PremiumReport {
    double premium0 = 0.0;
    double premium1 = 0.0;
    double delta = 0.0;  // premium1 - premium0
    double standard_error = 0.0;
    SignClass sign_class = SignClass::Zero;
    bool flagged = false;  // Monte Carlo missed its standard-error target
};

/// E[v - p] without disclosure: (1 - tau) mu0 - beta = mu0 - B0.
double premium_baseline(const EquilibriumCoefficients& coef, double mu0);

/// E[v - p] with disclosure, mu0 - E[J(X)]. The difference to the baseline
/// is integrated directly as E[X - J(X)] so that it keeps its precision
/// when it is small.
PremiumReport premium_with_range(const EquilibriumCoefficients& coef,
                                 const TruncatedNormal& kernel, double mu0,
                                 const QuadratureSpec& quad = {});

enum class MidpointClass { Raises, Neutral, Reduces };
const char* to_string(MidpointClass c);

/// Effect of disclosure on the premium predicted from the midpoint alone:
/// a midpoint above B0 reduces it, below B0 raises it.
MidpointClass classify_by_midpoint(const Range& range, const EquilibriumCoefficients& coef,
                                   double tol = defaults::kNeutralMidpointTol);

double compute_B0(const MarketParams& params);

/// B0 from the definition next to the expanded closed form as printed,
/// whose last denominator term carries gamma^3 where the coefficients give
/// gamma^2.
struct B0Diagnostic {
    double from_definition = 0.0;
    double printed_form = 0.0;
    double difference = 0.0;
};
B0Diagnostic B0_printed_form_check(const MarketParams& params);

struct SignedDerivative {
    std::string parameter;
    double derivative = 0.0;
    int expected_sign = 0;
    bool sign_matches = false;
};

/// Central finite differences of B0 in sigma_eps2, sigma_y2, sigma_u2, Z,
/// x_I and mu0, with the expected signs (-, -, -, -, +, +). The Z sign
/// assumes positive supply.
std::vector<SignedDerivative> B0_comparative_statics(const MarketParams& params);

struct PremiumSensitivities {
    double d_dupper = 0.0;
    double d_dlower = 0.0;
    double d_dmidpoint = 0.0;
    double d_dmu0 = 0.0;  // with Theta = B0 - mu0 held fixed
    double standard_error = 0.0;  // largest across the four, Monte Carlo only
};

PremiumSensitivities premium_sensitivities(const EquilibriumCoefficients& coef,
                                           const TruncatedNormal& kernel,
                                           const QuadratureSpec& quad = {});

/// Distances between mu0 and the range.
struct PremiumDistances {
    double D = 0.0;  // 0 when mu0 lies inside the range
    double D_upper = 0.0;
    double D_lower = 0.0;
    bool mu0_inside = false;
};
PremiumDistances compute_premium_distances(const Range& range, double mu0);

/// Premium limits. Points are distances from mu0 or range widths in units
/// of sigma_X.
enum class PremiumProbe {
    UpperFar,      // dPremium/d(upper) -> 0 as the upper bound rises from mu0
    LowerFar,      // dPremium/d(lower) -> 0 as the lower bound falls from mu0
    MidpointFar,   // dPremium/d(midpoint) -> -1 as the range leaves mu0
    Mu0Far,        // dPremium/d(mu0) -> 0 as the range leaves mu0
    DeltaWide,     // premium1 - premium0 -> 0 as the range widens around mu0
    MidpointWide,  // dPremium/d(midpoint) -> 0 as the range widens around mu0
};
const char* to_string(PremiumProbe p);

/// Far probes keep `length` fixed; UpperFar/LowerFar hold the other bound
/// `length` beyond B0. The noise floor is raised to the rounding level of
/// the quantities involved.
ProbeReport probe_premium_limit(PremiumProbe probe, Side side,
                                const EquilibriumCoefficients& coef, const MarketParams& params,
                                double length, std::span<const double> points,
                                const QuadratureSpec& quad = {},
                                const ProbeSettings& settings = {});

/// Geometric distances (sigma_X units) starting 5 sigma_X past B0 and
/// running far enough that the algebraic tails fall below `target`.
std::vector<double> default_premium_far_points(const EquilibriumCoefficients& coef,
                                               const MarketParams& params, Side side,
                                               double target = defaults::kProbeTarget);

}  // namespace rangeeq
