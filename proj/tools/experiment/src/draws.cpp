#include "rangeeq/experiment/draws.hpp"

#include <cmath>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace rangeeq::experiment {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      stream};
    return std::mt19937_64(seq);
}

}  // namespace

Draws::Draws(std::uint64_t seed, std::uint32_t stream) : engine_(make_engine(seed, stream)) {}

double Draws::uniform(double lo, double hi) {
    return boost::random::uniform_real_distribution<double>(lo, hi)(engine_);
}

double Draws::normal() { return boost::random::normal_distribution<double>()(engine_); }

MarketParams Draws::params() {
    MarketParams p;
    p.gamma = uniform(0.5, 5.0);
    p.mu0 = uniform(-30.0, 30.0);
    p.sigma_u2 = uniform(0.25, 10.0);
    p.sigma_eps2 = uniform(0.25, 4.0);
    p.sigma_y2 = uniform(0.25, 10.0);
    p.x_I = uniform(0.1, 0.9);
    p.Z = uniform(0.0, 40.0);
    p.D0 = 0.0;
    return p;
}

MarketState Draws::state(const MarketParams& p) {
    const double u = p.mu0 + std::sqrt(p.sigma_u2) * normal();
    const double y = std::sqrt(p.sigma_y2) * normal();
    return {u, y};
}

Range Draws::range_near(double center, double sd) {
    const double mid = center + uniform(-5.0, 5.0) * sd;
    return Range::centered(mid, uniform(0.5, 10.0) * sd);
}

}  // namespace rangeeq::experiment
