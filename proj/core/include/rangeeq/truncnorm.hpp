#pragma once

#include "rangeeq/tolerances.hpp"

namespace rangeeq {

/// Disclosed bounds [lower, upper] on the asset value.
struct Range {
    double lower = 0.0;
    double upper = 0.0;

    double length() const { return upper - lower; }
    double midpoint() const { return 0.5 * (lower + upper); }
    Range shifted(double c) const { return {lower + c, upper + c}; }

    static Range centered(double midpoint, double length) {
        return {midpoint - 0.5 * length, midpoint + 0.5 * length};
    }

    bool operator==(const Range&) const = default;
};

/// Standard deviation of the signal noise, kept alongside its square.
class NoiseScale {
public:
    /// Throws DomainError unless sigma is finite and positive.
    static NoiseScale from_sd(double sigma);
    static NoiseScale from_variance(double variance);

    double sd() const { return sd_; }
    double variance() const { return var_; }

private:
    NoiseScale(double sd, double var) : sd_(sd), var_(var) {}
    double sd_;
    double var_;
};

/// Everything the kernel knows at a single argument t.
struct KernelPoint {
    double mean;     // J(t)
    double shift;    // J(t) - t, free of cancellation inside the range
    double slope;    // H(t) = J'(t)
    double slope_complement;  // 1 - H(t), accurate where H(t) is close to 1
    double d_upper;  // dJ/d(upper)
    double d_lower;  // dJ/d(lower)
};

/// Mean of N(t, sigma^2) truncated to a range, viewed as a function of t.
///
/// mean(t) maps the real line onto the open range, slope(t) is its
/// derivative (equivalently the truncated variance over sigma^2) and lies in
/// (0, 1). Evaluation is stable for any finite t, including arguments
/// thousands of sigmas outside the range.
class TruncatedNormal {
public:
    /// Throws DomainError for a non-finite or degenerate range.
    TruncatedNormal(Range range, NoiseScale noise, KernelConfig config = {});

    double mean(double t) const;
    /// mean(t) - t, accurate where mean(t) is close to t.
    double shift(double t) const;
    double slope(double t) const;
    /// 1 - slope(t), equal to mean_d_upper(t) + mean_d_lower(t).
    double slope_complement(double t) const;
    double mean_d_upper(double t) const;
    double mean_d_lower(double t) const;
    KernelPoint at(double t) const;

    /// Solves mean(t) = p. Throws OutOfImageError unless lower < p < upper,
    /// NumericalError if the solver cannot meet the residual tolerance.
    double invert_mean(double p) const;

    const Range& range() const { return range_; }
    const NoiseScale& noise() const { return noise_; }
    const KernelConfig& config() const { return config_; }

private:
    Range range_;
    NoiseScale noise_;
    KernelConfig config_;
};

}  // namespace rangeeq
