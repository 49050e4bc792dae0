#include "rangeeq/premium.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "rangeeq/errors.hpp"
#include "rangeeq/quadrature.hpp"

namespace rangeeq {

namespace {

// Offsets (in sigma_eps) around each bound where J bends.
constexpr double kBendOffsets[] = {-16.0, -4.0, -1.0, 0.0, 1.0, 4.0, 16.0};

quad::Estimate expectation(const quad::Integrand& f, const EquilibriumCoefficients& coef,
                           const TruncatedNormal& kernel, const QuadratureSpec& spec) {
    spec.validate();
    const double mean = coef.B0;
    const double sd = coef.sigma_X();
    switch (spec.method) {
    case QuadratureMethod::Adaptive: {
        std::vector<double> cuts;
        const double s = kernel.noise().sd();
        for (double bound : {kernel.range().lower, kernel.range().upper}) {
            for (double k : kBendOffsets) {
                cuts.push_back(bound + k * s);
            }
        }
        return {quad::expect_adaptive(f, mean, sd, cuts), 0.0, false};
    }
    case QuadratureMethod::GaussHermite: {
        const quad::HermiteRule rule = quad::gauss_hermite(spec.resolved_count());
        return {quad::expect_hermite(f, mean, sd, rule), 0.0, false};
    }
    case QuadratureMethod::MonteCarlo:
        return quad::expect_monte_carlo(f, mean, sd, spec.resolved_count(), spec.seed,
                                        spec.target_se);
    }
    throw InvalidParameter("unknown quadrature method");
}

double B0_with(MarketParams p, double MarketParams::*field, double value) {
    p.*field = value;
    return compute_B0(p);
}

}  // namespace

const char* to_string(QuadratureMethod m) {
    switch (m) {
    case QuadratureMethod::Adaptive:
        return "adaptive";
    case QuadratureMethod::GaussHermite:
        return "hermite";
    case QuadratureMethod::MonteCarlo:
        return "mc";
    }
    return "?";
}

void QuadratureSpec::validate() const {
    if (method == QuadratureMethod::GaussHermite && nodes_or_samples != 0 &&
        nodes_or_samples < defaults::kMinHermiteNodes) {
        throw InvalidParameter("Hermite rule needs at least " +
                               std::to_string(defaults::kMinHermiteNodes) + " nodes");
    }
    if (method == QuadratureMethod::MonteCarlo && nodes_or_samples != 0 &&
        nodes_or_samples < defaults::kMinMonteCarloSamples) {
        throw InvalidParameter("Monte Carlo needs at least " +
                               std::to_string(defaults::kMinMonteCarloSamples) + " samples");
    }
    if (!(target_se > 0.0)) {
        throw InvalidParameter("target standard error must be positive");
    }
}

std::size_t QuadratureSpec::resolved_count() const {
    if (nodes_or_samples != 0) {
        return nodes_or_samples;
    }
    switch (method) {
    case QuadratureMethod::GaussHermite:
        return defaults::kHermiteNodes;
    case QuadratureMethod::MonteCarlo:
        return defaults::kMonteCarloSamples;
    case QuadratureMethod::Adaptive:
        break;
    }
    return 0;
}

QuadratureSpec QuadratureSpec::hermite(std::size_t nodes) {
    QuadratureSpec q;
    q.method = QuadratureMethod::GaussHermite;
    q.nodes_or_samples = nodes;
    return q;
}

QuadratureSpec QuadratureSpec::monte_carlo(std::size_t samples, std::uint64_t seed) {
    QuadratureSpec q;
    q.method = QuadratureMethod::MonteCarlo;
    q.nodes_or_samples = samples;
    q.seed = seed;
    return q;
}

const char* to_string(SignClass s) {
    switch (s) {
    case SignClass::Positive:
        return "positive";
    case SignClass::Zero:
        return "zero";
    case SignClass::Negative:
        return "negative";
    }
    return "?";
}

const char* to_string(MidpointClass c) {
    switch (c) {
    case MidpointClass::Raises:
        return "raises";
    case MidpointClass::Neutral:
        return "neutral";
    case MidpointClass::Reduces:
        return "reduces";
    }
    return "?";
}

double premium_baseline(const EquilibriumCoefficients& coef, double mu0) {
    return (1.0 - coef.tau) * mu0 - coef.beta;
}

PremiumReport premium_with_range(const EquilibriumCoefficients& coef,
                                 const TruncatedNormal& kernel, double mu0,
                                 const QuadratureSpec& quad) {
    const quad::Estimate e =
        expectation([&](double x) { return -kernel.shift(x); }, coef, kernel, quad);
    PremiumReport r;
    r.premium0 = premium_baseline(coef, mu0);
    r.delta = e.value;
    r.premium1 = r.premium0 + r.delta;
    r.standard_error = e.standard_error;
    r.flagged = e.flagged;
    const double band = std::max(defaults::kPremiumZeroTol, 3.0 * e.standard_error);
    if (std::abs(r.delta) <= band) {
        r.sign_class = SignClass::Zero;
    } else {
        r.sign_class = r.delta > 0.0 ? SignClass::Positive : SignClass::Negative;
    }
    return r;
}

MidpointClass classify_by_midpoint(const Range& range, const EquilibriumCoefficients& coef,
                                   double tol) {
    const double gap = range.midpoint() - coef.B0;
    if (std::abs(gap) <= tol) {
        return MidpointClass::Neutral;
    }
    return gap > 0.0 ? MidpointClass::Reduces : MidpointClass::Raises;
}

double compute_B0(const MarketParams& params) { return solve_coefficients(params).B0; }

B0Diagnostic B0_printed_form_check(const MarketParams& params) {
    params.validate();
    const double g = params.gamma;
    const double se2 = params.sigma_eps2;
    const double su2 = params.sigma_u2;
    const double sy2 = params.sigma_y2;
    const double xI = params.x_I;
    B0Diagnostic d;
    d.from_definition = compute_B0(params);
    d.printed_form = params.mu0 - params.Z * g * se2 -
                     params.Z * g * g * g * params.x_U() * su2 * se2 * se2 * sy2 /
                         (g * g * se2 * se2 * sy2 + xI * xI * su2 + g * g * g * xI * su2 * se2 * sy2);
    d.difference = d.printed_form - d.from_definition;
    return d;
}

std::vector<SignedDerivative> B0_comparative_statics(const MarketParams& params) {
    params.validate();
    struct Entry {
        const char* name;
        double MarketParams::*field;
        int sign;
        bool positive_only;
    };
    const Entry entries[] = {
        {"sigma_eps2", &MarketParams::sigma_eps2, -1, true},
        {"sigma_y2", &MarketParams::sigma_y2, -1, true},
        {"sigma_u2", &MarketParams::sigma_u2, -1, true},
        {"Z", &MarketParams::Z, -1, false},
        {"x_I", &MarketParams::x_I, +1, true},
        {"mu0", &MarketParams::mu0, +1, false},
    };
    const double step = std::cbrt(std::numeric_limits<double>::epsilon());
    std::vector<SignedDerivative> out;
    for (const Entry& e : entries) {
        const double v = params.*(e.field);
        double h = step * std::max(1.0, std::abs(v));
        if (e.positive_only) {
            h = std::min(h, 0.5 * v);
        }
        if (e.field == &MarketParams::x_I) {
            h = std::min(h, 0.5 * (1.0 - v));
        }
        SignedDerivative d;
        d.parameter = e.name;
        d.derivative = (B0_with(params, e.field, v + h) - B0_with(params, e.field, v - h)) / (2.0 * h);
        d.expected_sign = e.sign;
        d.sign_matches = (d.derivative > 0.0 && e.sign > 0) || (d.derivative < 0.0 && e.sign < 0);
        out.push_back(d);
    }
    return out;
}

PremiumSensitivities premium_sensitivities(const EquilibriumCoefficients& coef,
                                           const TruncatedNormal& kernel,
                                           const QuadratureSpec& quad) {
    PremiumSensitivities s;
    auto take = [&](const quad::Integrand& f) {
        const quad::Estimate e = expectation(f, coef, kernel, quad);
        s.standard_error = std::max(s.standard_error, e.standard_error);
        return e.value;
    };
    s.d_dupper = -take([&](double x) { return kernel.mean_d_upper(x); });
    s.d_dlower = -take([&](double x) { return kernel.mean_d_lower(x); });
    s.d_dmidpoint = -take([&](double x) { return kernel.slope_complement(x); });
    s.d_dmu0 = -take([&](double x) { return kernel.slope(x); });
    return s;
}

PremiumDistances compute_premium_distances(const Range& range, double mu0) {
    PremiumDistances d;
    d.D_upper = std::abs(range.upper - mu0);
    d.D_lower = std::abs(mu0 - range.lower);
    if (mu0 < range.lower) {
        d.D = range.lower - mu0;
    } else if (mu0 > range.upper) {
        d.D = mu0 - range.upper;
    } else {
        d.mu0_inside = true;
    }
    return d;
}

const char* to_string(PremiumProbe p) {
    switch (p) {
    case PremiumProbe::UpperFar:
        return "premium_upper_far";
    case PremiumProbe::LowerFar:
        return "premium_lower_far";
    case PremiumProbe::MidpointFar:
        return "premium_midpoint_far";
    case PremiumProbe::Mu0Far:
        return "premium_mu0_far";
    case PremiumProbe::DeltaWide:
        return "premium_delta_wide";
    case PremiumProbe::MidpointWide:
        return "premium_midpoint_wide";
    }
    return "?";
}

ProbeReport probe_premium_limit(PremiumProbe probe, Side side,
                                const EquilibriumCoefficients& coef, const MarketParams& params,
                                double length, std::span<const double> points,
                                const QuadratureSpec& quad, const ProbeSettings& settings) {
    const NoiseScale noise = params.noise();
    const double sx = coef.sigma_X();
    const double mu0 = params.mu0;

    auto far_range = [&](double d) {
        return side == Side::Above ? Range{mu0 + d * sx, mu0 + d * sx + length}
                                   : Range{mu0 - d * sx - length, mu0 - d * sx};
    };
    auto sens = [&](Range r) {
        return premium_sensitivities(coef, TruncatedNormal(r, noise, settings.kernel), quad);
    };

    std::function<double(double)> quantity;
    double limit = 0.0;
    switch (probe) {
    case PremiumProbe::UpperFar:
        quantity = [&](double d) { return sens(Range{coef.B0 - length, mu0 + d * sx}).d_dupper; };
        break;
    case PremiumProbe::LowerFar:
        quantity = [&](double d) { return sens(Range{mu0 - d * sx, coef.B0 + length}).d_dlower; };
        break;
    case PremiumProbe::MidpointFar:
        quantity = [&](double d) { return sens(far_range(d)).d_dmidpoint; };
        limit = -1.0;
        break;
    case PremiumProbe::Mu0Far:
        quantity = [&](double d) { return sens(far_range(d)).d_dmu0; };
        break;
    case PremiumProbe::DeltaWide:
        quantity = [&](double w) {
            const TruncatedNormal k(Range::centered(mu0, w * sx), noise, settings.kernel);
            return premium_with_range(coef, k, mu0, quad).delta;
        };
        break;
    case PremiumProbe::MidpointWide:
        quantity = [&](double w) { return sens(Range::centered(mu0, w * sx)).d_dmidpoint; };
        break;
    }
    ProbeSettings effective = settings;
    effective.noise_floor =
        std::max(settings.noise_floor, 1e-12 * (std::abs(mu0) + std::abs(coef.B0) + sx));
    return limit_probe(to_string(probe), points, quantity, limit, effective);
}

std::vector<double> default_premium_far_points(const EquilibriumCoefficients& coef,
                                               const MarketParams& params, Side side,
                                               double target) {
    const double sx = coef.sigma_X();
    const double offset = side == Side::Above ? coef.theta / sx : -coef.theta / sx;
    const double start = 5.0 + std::max(0.0, offset);
    // The expected slope decays like (sigma_eps / distance)^2.
    const double reach = 4.0 * std::sqrt(params.sigma_eps2) / (sx * std::sqrt(target));
    return geometric_sequence(start, 2.0, std::max(4.0 * start, reach));
}

}  // namespace rangeeq
