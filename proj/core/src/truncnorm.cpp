#include "rangeeq/truncnorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rangeeq/errors.hpp"
#include "rangeeq/normal_tail.hpp"

namespace rangeeq {

NoiseScale NoiseScale::from_sd(double sigma) {
    if (!std::isfinite(sigma) || sigma <= 0.0) {
        throw DomainError("noise scale must be finite and positive, got " + std::to_string(sigma));
    }
    return NoiseScale(sigma, sigma * sigma);
}

NoiseScale NoiseScale::from_variance(double variance) {
    if (!std::isfinite(variance) || variance <= 0.0) {
        throw DomainError("noise variance must be finite and positive, got " +
                          std::to_string(variance));
    }
    return NoiseScale(std::sqrt(variance), variance);
}

TruncatedNormal::TruncatedNormal(Range range, NoiseScale noise, KernelConfig config)
    : range_(range), noise_(noise), config_(config) {
    if (!std::isfinite(range.lower) || !std::isfinite(range.upper)) {
        throw DomainError("range bounds must be finite");
    }
    if (!(range.length() >= config.degenerate_range_ratio * noise.sd())) {
        throw DomainError("degenerate range [" + std::to_string(range.lower) + ", " +
                          std::to_string(range.upper) + "]");
    }
}

KernelPoint TruncatedNormal::at(double t) const {
    if (!std::isfinite(t)) {
        throw DomainError("truncated mean argument must be finite");
    }
    const double s = noise_.sd();
    const double lo = (range_.lower - t) / s;
    const double hi = (range_.upper - t) / s;
    const normal::IntervalMoments m = normal::interval_moments(
        lo, hi, range_.length() / s, config_.tail_threshold, config_.continued_fraction_depth);
    KernelPoint out{};
    switch (m.anchor) {
    case normal::Anchor::Lower:
        out.mean = range_.lower + s * m.offset;
        out.shift = (range_.lower - t) + s * m.offset;
        break;
    case normal::Anchor::Upper:
        out.mean = range_.upper - s * m.offset;
        out.shift = (range_.upper - t) - s * m.offset;
        break;
    case normal::Anchor::Origin:
        out.mean = t + s * m.offset;
        out.shift = s * m.offset;
        break;
    }
    out.slope = m.variance;
    out.d_upper = m.d_upper;
    out.d_lower = m.d_lower;
    out.slope_complement = m.d_upper + m.d_lower;
    return out;
}

double TruncatedNormal::mean(double t) const { return at(t).mean; }
double TruncatedNormal::shift(double t) const { return at(t).shift; }
double TruncatedNormal::slope(double t) const { return at(t).slope; }
double TruncatedNormal::slope_complement(double t) const { return at(t).slope_complement; }
double TruncatedNormal::mean_d_upper(double t) const { return at(t).d_upper; }
double TruncatedNormal::mean_d_lower(double t) const { return at(t).d_lower; }

double TruncatedNormal::invert_mean(double p) const {
    if (!std::isfinite(p) || !(p > range_.lower && p < range_.upper)) {
        throw OutOfImageError("price " + std::to_string(p) + " is outside the open range (" +
                              std::to_string(range_.lower) + ", " +
                              std::to_string(range_.upper) + ")");
    }
    const double s = noise_.sd();
    const double gap_hi = range_.upper - p;
    const double gap_lo = p - range_.lower;
    const double near = 0.25 * std::min(s, range_.length());

    // Far outside the range the mean approaches a bound like
    // bound -/+ sigma^2 / distance; use that to start close to the root.
    double t = 0.0;
    if (gap_hi < near) {
        t = range_.upper + s * s / gap_hi;
    } else if (gap_lo < near) {
        t = range_.lower - s * s / gap_lo;
    } else {
        const double mid = range_.midpoint();
        t = mid + (p - mid) / slope(mid);
    }

    auto residual = [&](double x) { return mean(x) - p; };

    double f = residual(t);
    if (f == 0.0) {
        return t;
    }
    double lo = t;
    double hi = t;
    double step = std::max(s, range_.length());
    if (f < 0.0) {
        for (;;) {
            hi = lo + step;
            const double fh = residual(hi);
            if (fh >= 0.0) {
                if (fh == 0.0) return hi;
                break;
            }
            lo = hi;
            step *= 2.0;
        }
    } else {
        for (;;) {
            lo = hi - step;
            const double fl = residual(lo);
            if (fl <= 0.0) {
                if (fl == 0.0) return lo;
                break;
            }
            hi = lo;
            step *= 2.0;
        }
    }

    constexpr double eps = std::numeric_limits<double>::epsilon();
    double best_t = t;
    double best_f = std::abs(f);
    int settled = 0;
    for (int it = 0; it < config_.inverse_max_iterations; ++it) {
        const KernelPoint k = at(t);
        f = k.mean - p;
        if (f == 0.0) {
            return t;
        }
        if (std::abs(f) < best_f) {
            best_f = std::abs(f);
            best_t = t;
        }
        if (f < 0.0) {
            lo = std::max(lo, t);
        } else {
            hi = std::min(hi, t);
        }
        const double newton = -f / k.slope;
        if (std::abs(f) <= config_.inverse_residual_tol) {
            // Within tolerance: stop once Newton has nothing left to add, or
            // once the residual has sat at rounding level for a few steps.
            if (std::abs(newton) <= config_.inverse_step_tol * std::max(s, std::abs(t)) ||
                ++settled >= 4) {
                return best_t;
            }
        }
        if (hi - lo <= 4.0 * eps * std::max({std::abs(lo), std::abs(hi), s})) {
            break;
        }
        double next = t + newton;
        if (!std::isfinite(next) || next <= lo || next >= hi) {
            next = 0.5 * (lo + hi);
        }
        t = next;
    }
    if (best_f <= config_.inverse_residual_tol) {
        return best_t;
    }
    throw NumericalError("truncated mean inversion did not converge for price " +
                         std::to_string(p));
}

}  // namespace rangeeq
