#pragma once

#include <cstddef>

namespace rangeeq {

// Default numerical settings. Everything that takes a tolerance accepts an
// override; these are the values used when none is given.
namespace defaults {

// Standardized distance beyond which the Mills ratio switches from the
// erfc form to the continued fraction.
inline constexpr double kTailThreshold = 8.0;
// Continued-fraction depth; exact to double precision for x >= 8.
inline constexpr int kContinuedFractionDepth = 60;
// Ranges shorter than this multiple of sigma_eps are rejected.
inline constexpr double kDegenerateRangeRatio = 1e-9;

inline constexpr double kInverseResidualTol = 1e-10;
inline constexpr double kInverseStepTol = 1e-13;
inline constexpr int kInverseMaxIterations = 500;

inline constexpr double kDriverTieTol = 1e-12;
inline constexpr double kNeutralMidpointTol = 1e-9;
// Premium differences within this band (or 3 standard errors) are zero.
inline constexpr double kPremiumZeroTol = 1e-8;

inline constexpr std::size_t kHermiteNodes = 200;
inline constexpr std::size_t kMinHermiteNodes = 20;
inline constexpr std::size_t kMonteCarloSamples = 1'000'000;
inline constexpr std::size_t kMinMonteCarloSamples = 10'000;
inline constexpr double kMonteCarloTargetSe = 1e-3;
inline constexpr double kAdaptiveRelTol = 1e-13;
inline constexpr double kAdaptiveAbsTol = 1e-15;
inline constexpr unsigned kAdaptiveMaxDepth = 18;

inline constexpr double kProbeTarget = 1e-8;
inline constexpr double kProbeNoiseFloor = 1e-14;

}  // namespace defaults

/// Settings for the truncated-normal kernel.
struct KernelConfig {
    double tail_threshold = defaults::kTailThreshold;
    int continued_fraction_depth = defaults::kContinuedFractionDepth;
    double degenerate_range_ratio = defaults::kDegenerateRangeRatio;
    double inverse_residual_tol = defaults::kInverseResidualTol;
    double inverse_step_tol = defaults::kInverseStepTol;
    int inverse_max_iterations = defaults::kInverseMaxIterations;
};

}  // namespace rangeeq
