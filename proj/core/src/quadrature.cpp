#include "rangeeq/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/random/normal_distribution.hpp>

#include "rangeeq/errors.hpp"
#include "rangeeq/normal_tail.hpp"

namespace rangeeq::quad {

namespace {

constexpr double kZLimit = 38.0;
constexpr std::size_t kPairsPerBlock = 4096;
// Error estimates below this many ulps of a panel's |f| integral are
// rounding, not truncation, and further bisection cannot reduce them.
constexpr double kRoundingUlps = 256.0;
// A split that leaves the summed error above this fraction of the
// parent's is treated as hitting rounding, but only once the error is
// below kNoiseLevel of the panel's |f| integral: a coarse panel that has
// not yet resolved the integrand can also fail to gain on its first split.
constexpr double kNoGain = 0.9;
constexpr double kNoiseLevel = 1e-10;
// The bulk of the normal weight, cut so that first-pass panels resolve it
// whatever f does.
constexpr double kBulkCuts[] = {-kZLimit, -8.0, -4.0, -2.0, 0.0, 2.0, 4.0, 8.0, kZLimit};

}  // namespace

HermiteRule gauss_hermite(std::size_t n) {
    if (n == 0) {
        throw InvalidParameter("Hermite rule needs at least one node");
    }
    // Golub-Welsch: the nodes are the eigenvalues of the Jacobi matrix of
    // the Hermite recurrence.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXd off(static_cast<Eigen::Index>(n > 1 ? n - 1 : 0));
    for (Eigen::Index k = 0; k < off.size(); ++k) {
        off[k] = std::sqrt(0.5 * static_cast<double>(k + 1));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("Hermite eigenproblem failed for n = " + std::to_string(n));
    }

    // Polish each node by Newton on the orthonormal recurrence and take the
    // weight from the derivative there; this keeps full relative accuracy
    // in the tiny outer weights.
    const double pim4 = 1.0 / std::sqrt(std::sqrt(std::numbers::pi));
    const double dn = static_cast<double>(n);
    HermiteRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double z = solver.eigenvalues()[static_cast<Eigen::Index>(i)];
        double pp = 0.0;
        for (int it = 0; it < 4; ++it) {
            double p1 = pim4;
            double p2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                const double dj = static_cast<double>(j);
                p1 = z * std::sqrt(2.0 / (dj + 1.0)) * p2 - std::sqrt(dj / (dj + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * dn) * p2;
            z -= p1 / pp;
        }
        if (!std::isfinite(z) || !std::isfinite(pp) || pp == 0.0) {
            throw NumericalError("Hermite node refinement failed for n = " + std::to_string(n));
        }
        rule.nodes[i] = z;
        rule.weights[i] = 2.0 / (pp * pp);
    }
    return rule;
}

double expect_hermite(const Integrand& f, double mean, double sd, const HermiteRule& rule) {
    const double scale = std::numbers::sqrt2 * sd;
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        if (rule.weights[i] > 0.0) {
            sum += rule.weights[i] * f(mean + scale * rule.nodes[i]);
        }
    }
    return sum / std::sqrt(std::numbers::pi);
}

double expect_adaptive(const Integrand& f, double mean, double sd,
                       std::span<const double> breakpoints, double rel_tol, double abs_tol,
                       unsigned max_depth) {
    std::vector<double> cuts(std::begin(kBulkCuts), std::end(kBulkCuts));
    for (double b : breakpoints) {
        const double z = (b - mean) / sd;
        if (std::isfinite(z) && z > -kZLimit && z < kZLimit) {
            cuts.push_back(z);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto g = [&](double z) { return f(mean + sd * z) * normal::pdf(z); };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    struct Panel {
        double a;
        double b;
        double value;
        double error;
        double l1;
    };
    auto panel = [&](double a, double b) {
        double err = 0.0;
        double l1 = 0.0;
        const double v = GK::integrate(g, a, b, 0, 0.0, &err, &l1);
        return Panel{a, b, v, err, l1};
    };

    // The integrand may change sign, so the stopping rule is absolute:
    // a fraction of the integral of |f| pdf, estimated on the first pass,
    // but no finer than abs_tol, below which rounding in f dominates.
    std::vector<Panel> pieces;
    double l1 = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        pieces.push_back(panel(cuts[i], cuts[i + 1]));
        l1 += pieces.back().l1;
    }
    const double tol = std::max(rel_tol * l1, abs_tol);
    const double span = cuts.back() - cuts.front();

    std::function<double(const Panel&, unsigned)> refine = [&](const Panel& p,
                                                               unsigned depth) -> double {
        const double noise = kRoundingUlps * std::numeric_limits<double>::epsilon() * p.l1;
        if (depth == 0 || p.error <= std::max(tol * (p.b - p.a) / span, noise)) {
            return p.value;
        }
        const double mid = 0.5 * (p.a + p.b);
        const Panel left = panel(p.a, mid);
        const Panel right = panel(mid, p.b);
        // Halving a resolved smooth panel cuts the error estimate by orders
        // of magnitude and halving at a kink or jump roughly halves it; no
        // gain at all on a nearly converged panel means rounding noise in f.
        if (p.error <= kNoiseLevel * p.l1 && left.error + right.error >= kNoGain * p.error) {
            return left.value + right.value;
        }
        return refine(left, depth - 1) + refine(right, depth - 1);
    };
    double total = 0.0;
    for (const Panel& p : pieces) {
        total += refine(p, max_depth);
    }
    return total;
}

Estimate expect_monte_carlo(const Integrand& f, double mean, double sd, std::size_t samples,
                            std::uint64_t seed, double target_se) {
    const std::size_t pairs = (samples + 1) / 2;
    const std::size_t blocks = (pairs + kPairsPerBlock - 1) / kPairsPerBlock;
    const auto seed_lo = static_cast<std::uint32_t>(seed);
    const auto seed_hi = static_cast<std::uint32_t>(seed >> 32);

    // Pair means are accumulated in a fixed order; Welford keeps the
    // variance accurate when the pair means are nearly constant.
    double count = 0.0;
    double avg = 0.0;
    double m2 = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        std::seed_seq seq{seed_lo, seed_hi, static_cast<std::uint32_t>(b),
                          static_cast<std::uint32_t>(b >> 32)};
        std::mt19937_64 engine(seq);
        boost::random::normal_distribution<double> normal;
        const std::size_t in_block = std::min(kPairsPerBlock, pairs - b * kPairsPerBlock);
        for (std::size_t k = 0; k < in_block; ++k) {
            const double dz = sd * normal(engine);
            const double v = 0.5 * (f(mean + dz) + f(mean - dz));
            count += 1.0;
            const double delta = v - avg;
            avg += delta / count;
            m2 += delta * (v - avg);
        }
    }
    Estimate e;
    e.value = avg;
    e.standard_error = count > 1.0 ? std::sqrt(m2 / (count - 1.0) / count) : INFINITY;
    e.flagged = !(e.standard_error <= target_se);
    return e;
}

}  // namespace rangeeq::quad
