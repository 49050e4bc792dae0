#pragma once

#include "rangeeq/tolerances.hpp"

namespace rangeeq::normal {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;
inline constexpr double kSqrtHalfPi = 1.253314137315500251207882642405522627;
inline constexpr double kInvSqrt2 = 0.707106781186547524400844362104849039;
inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736405617640;

double pdf(double z);
double cdf(double z);
// Upper tail probability 1 - cdf(z), accurate for large z.
double sf(double z);

/// Mills ratio M(x) = sf(x)/pdf(x) and the first two moments of the
/// overshoot z - x given z >= x, for x >= 0:
///
///   mean_excess   = (1 - x M(x)) / M(x)
///   second_excess = (M(x) (1 + x^2) - x) / M(x)
///
/// All three are evaluated without cancellation or underflow: below the
/// threshold from erfc, above it from the Laplace continued fraction
///   M(x) = 1/(x + 1/(x + 2/(x + 3/(x + ...)))).
struct MillsTail {
    double mills;
    double mean_excess;
    double second_excess;
};

MillsTail mills_tail(double x, double threshold = defaults::kTailThreshold,
                     int depth = defaults::kContinuedFractionDepth);

/// Where IntervalMoments::offset is measured from.
enum class Anchor { Lower, Upper, Origin };

/// Moments of a standard normal z restricted to [lo, hi].
///
/// The mean is reported relative to an anchor so that it keeps full
/// precision when the interval sits far in a tail:
///   Lower:  E[z] = lo + offset
///   Upper:  E[z] = hi - offset
///   Origin: E[z] = offset
/// d_lower and d_upper are the partial derivatives of E[z] in lo and hi.
struct IntervalMoments {
    Anchor anchor;
    double offset;
    double variance;
    double d_lower;
    double d_upper;
    double log_mass;  // log P(lo <= z <= hi)
};

/// `width` must equal hi - lo; callers pass it separately when they can
/// form it more accurately than the subtraction.
IntervalMoments interval_moments(double lo, double hi, double width,
                                 double threshold = defaults::kTailThreshold,
                                 int depth = defaults::kContinuedFractionDepth);

/// log(cdf(hi) - cdf(lo)) for lo < hi, finite for any finite pair.
double log_interval_mass(double lo, double hi,
                         double threshold = defaults::kTailThreshold,
                         int depth = defaults::kContinuedFractionDepth);

}  // namespace rangeeq::normal
