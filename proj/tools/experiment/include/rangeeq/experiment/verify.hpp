#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rangeeq/tolerances.hpp"

namespace rangeeq::experiment {

enum class Verbosity { Quiet, Normal, Debug };

Verbosity parse_verbosity(const std::string& name);

struct VerifyOptions {
    std::uint64_t seed = 42;
    // Applied to every kernel the checks build; the mutation tests degrade
    // it on purpose.
    KernelConfig kernel{};
    double fd_rel_tol = 1e-6;
    double identity_tol = 1e-12;
    double probe_target = defaults::kProbeTarget;
    std::size_t mc_samples = defaults::kMonteCarloSamples;

    int kernel_draws = 1000;
    int demand_draws = 200;
    int param_sets = 20;
    int states_per_set = 25;
    int premium_sets = 5;
};

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
    nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
};

struct VerifyReport {
    std::uint64_t seed = 0;
    std::vector<Check> checks;

    std::size_t failures() const;
    bool all_passed() const { return failures() == 0; }
    const Check* find(const std::string& name) const;

    /// Deterministic given the options: no timings or addresses.
    nlohmann::ordered_json to_json() const;
    std::string to_text(Verbosity v) const;
};

/// Runs every property suite on fixed-seed draws. Failures are report
/// content, not exceptions.
VerifyReport run_verify(const VerifyOptions& options = {});

}  // namespace rangeeq::experiment
