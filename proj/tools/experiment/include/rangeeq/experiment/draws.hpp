#pragma once

#include <cstdint>
#include <random>

#include "rangeeq/equilibrium.hpp"
#include "rangeeq/truncnorm.hpp"

namespace rangeeq::experiment {

/// Reproducible random scenarios. Each stream is seeded from (seed, stream)
/// so that suites do not depend on one another's draw counts.
class Draws {
public:
    Draws(std::uint64_t seed, std::uint32_t stream);

    double uniform(double lo, double hi);
    double normal();

    /// gamma in [0.5, 5], mu0 in [-30, 30], variances in [0.25, 10],
    /// x_I in [0.1, 0.9], Z in [0, 40], D0 = 0.
    MarketParams params();
    /// u and y from their unconditional distributions.
    MarketState state(const MarketParams& p);
    /// Midpoint within 5 sd of `center`, length between 0.5 and 10 sd.
    Range range_near(double center, double sd);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace rangeeq::experiment
