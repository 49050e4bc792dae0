#include "rangeeq/normal_tail.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace rangeeq::normal {

namespace {

// 16-point Gauss-Legendre rule on [-1, 1]; positive half, symmetric.
constexpr std::array<std::array<double, 2>, 8> kLegendre16 = {{
    {0.095012509837637454, 0.18945061045506859},
    {0.28160355077925892, 0.18260341504492361},
    {0.45801677765722737, 0.16915651939500262},
    {0.61787624440264377, 0.14959598881657676},
    {0.755404408355003, 0.12462897125553403},
    {0.86563120238783176, 0.095158511682492591},
    {0.9445750230732326, 0.062253523938647706},
    {0.98940093499164994, 0.027152459411754037},
}};

// exp(y*y) with the rounding error of the square folded back in.
double exp_square(double y) {
    const double y2 = y * y;
    const double err = std::fma(y, y, -y2);
    return std::exp(y2) * (1.0 + err);
}

// Narrow intervals: the closed forms below lose digits to cancellation
// when the density is nearly flat across [lo, hi], so integrate the
// density ratio pdf(lo + s)/pdf(lo) = exp(-lo s - s^2/2) on [0, w] directly.
bool use_flat_rule(double lo, double width) {
    return width <= 1.0 && std::abs(lo) * width <= 2.0;
}

IntervalMoments flat_rule(double lo, double width) {
    const double half = 0.5 * width;
    std::array<double, 16> s{};
    std::array<double, 16> wr{};
    for (std::size_t i = 0; i < kLegendre16.size(); ++i) {
        const double dx = half * kLegendre16[i][0];
        const double wt = half * kLegendre16[i][1];
        s[2 * i] = half - dx;
        s[2 * i + 1] = half + dx;
        wr[2 * i] = wt * std::exp(-lo * s[2 * i] - 0.5 * s[2 * i] * s[2 * i]);
        wr[2 * i + 1] = wt * std::exp(-lo * s[2 * i + 1] - 0.5 * s[2 * i + 1] * s[2 * i + 1]);
    }
    double m0 = 0.0;
    double m1 = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        m0 += wr[i];
        m1 += wr[i] * s[i];
    }
    const double mean = m1 / m0;
    double var = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double c = s[i] - mean;
        var += wr[i] * c * c;
    }
    var /= m0;
    const double edge = std::exp(-lo * width - 0.5 * width * width);
    IntervalMoments out{};
    out.anchor = Anchor::Lower;
    out.offset = mean;
    out.variance = var;
    out.d_lower = mean / m0;
    out.d_upper = edge * (width - mean) / m0;
    out.log_mass = -0.5 * lo * lo - kLogSqrt2Pi + std::log(m0);
    return out;
}

// Interval entirely above the mean (lo >= 0). Everything is expressed
// through the overshoot s = z - lo and scaled by sf(lo), so nothing
// underflows however far out lo is.
IntervalMoments upper_side(double lo, double hi, double width, double threshold, int depth) {
    const MillsTail a = mills_tail(lo, threshold, depth);
    const double e = std::exp(-width * (lo + 0.5 * width));
    MillsTail b{0.0, 0.0, 0.0};
    if (e > 0.0) {
        b = mills_tail(hi, threshold, depth);
    }
    // Share of the tail past lo that lies beyond hi.
    const double beyond = e * b.mills / a.mills;
    const double kept = 1.0 - beyond;
    const double mean = (a.mean_excess - beyond * (b.mean_excess + width)) / kept;
    const double m2 = (a.second_excess -
                       beyond * (b.second_excess + width * (2.0 * b.mean_excess + width))) /
                      kept;
    const double mass = a.mills * kept;
    IntervalMoments out{};
    out.anchor = Anchor::Lower;
    out.offset = mean;
    out.variance = m2 - mean * mean;
    out.d_lower = mean / mass;
    out.d_upper = e * (width - mean) / mass;
    out.log_mass = -0.5 * lo * lo - kLogSqrt2Pi + std::log(a.mills) + std::log1p(-beyond);
    return out;
}

IntervalMoments straddle(double lo, double hi) {
    const double mass = 0.5 * (std::erf(hi * kInvSqrt2) - std::erf(lo * kInvSqrt2));
    const double fa = pdf(lo);
    const double fb = pdf(hi);
    const double mean = (fa - fb) / mass;
    IntervalMoments out{};
    out.anchor = Anchor::Origin;
    out.offset = mean;
    out.variance = 1.0 + (lo * fa - hi * fb) / mass - mean * mean;
    out.d_lower = fa / mass * (mean - lo);
    out.d_upper = fb / mass * (hi - mean);
    out.log_mass = std::log(mass);
    return out;
}

}  // namespace

double pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double sf(double z) { return 0.5 * std::erfc(z * kInvSqrt2); }

MillsTail mills_tail(double x, double threshold, int depth) {
    MillsTail out{};
    if (x >= threshold) {
        // Backward recurrence C_k = k / (x + C_{k+1}); M = 1/(x + C_1).
        double c2 = 0.0;
        for (int k = depth; k >= 2; --k) {
            c2 = k / (x + c2);
        }
        const double c1 = 1.0 / (x + c2);
        out.mills = 1.0 / (x + c1);
        out.mean_excess = c1;
        out.second_excess = c1 * c2;
        return out;
    }
    const double y = x * kInvSqrt2;
    out.mills = kSqrtHalfPi * std::erfc(y) * exp_square(y);
    out.mean_excess = (1.0 - x * out.mills) / out.mills;
    out.second_excess = (out.mills * (1.0 + x * x) - x) / out.mills;
    return out;
}

IntervalMoments interval_moments(double lo, double hi, double width, double threshold,
                                 int depth) {
    if (use_flat_rule(lo, width)) {
        return flat_rule(lo, width);
    }
    if (lo >= 0.0) {
        return upper_side(lo, hi, width, threshold, depth);
    }
    if (hi <= 0.0) {
        const IntervalMoments r = upper_side(-hi, -lo, width, threshold, depth);
        IntervalMoments out = r;
        out.anchor = Anchor::Upper;
        out.d_lower = r.d_upper;
        out.d_upper = r.d_lower;
        return out;
    }
    return straddle(lo, hi);
}

double log_interval_mass(double lo, double hi, double threshold, int depth) {
    return interval_moments(lo, hi, hi - lo, threshold, depth).log_mass;
}

}  // namespace rangeeq::normal
