// rangeeq: equilibrium, curves, premium report and verification from the
// command line. Exit codes: 0 ok, 1 configuration error, 2 verification
// failure, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rangeeq/errors.hpp"
#include "rangeeq/experiment/runs.hpp"
#include "rangeeq/experiment/scenario.hpp"
#include "rangeeq/experiment/table.hpp"
#include "rangeeq/experiment/verify.hpp"

namespace ex = rangeeq::experiment;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kConfig = 1, kVerify = 2, kNumerical = 3 };

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format;
    std::string quad;
    std::optional<std::size_t> nodes;
    std::optional<std::size_t> samples;
    std::string verbosity = "normal";
    std::string echo_config;
};

ex::Scenario build_scenario(const Flags& f, ex::Scenario base) {
    ex::Scenario s = f.config.empty() ? base : ex::load_scenario(f.config, base);
    if (!f.quad.empty()) {
        s.quad.method = ex::parse_quadrature_method(f.quad);
    }
    if (f.nodes) {
        if (s.quad.method != rangeeq::QuadratureMethod::GaussHermite) {
            throw ex::ConfigError("--nodes applies to --quad hermite");
        }
        s.quad.nodes_or_samples = *f.nodes;
    }
    if (f.samples) {
        if (s.quad.method != rangeeq::QuadratureMethod::MonteCarlo) {
            throw ex::ConfigError("--samples applies to --quad mc");
        }
        s.quad.nodes_or_samples = *f.samples;
    }
    if (f.seed) {
        s.quad.seed = *f.seed;
    }
    if (!f.out.empty()) {
        s.output.path = f.out;
    }
    if (!f.format.empty()) {
        s.output.format = f.format;
    }
    try {
        s.quad.validate();
    } catch (const rangeeq::InvalidParameter& e) {
        throw ex::ConfigError(e.what());
    }
    if (!f.echo_config.empty()) {
        std::ofstream echo(f.echo_config);
        if (!echo) {
            throw ex::ConfigError("cannot write '" + f.echo_config + "'");
        }
        echo << ex::to_json(s).dump(2) << '\n';
    }
    return s;
}

// Writes to the scenario's output path, or stdout when it is empty.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw ex::ConfigError("cannot write '" + path + "'");
    }
    write(out);
}

// One "dotted.key,value" line per leaf.
void flatten(const json& j, const std::string& prefix, std::ostream& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            flatten(v, prefix.empty() ? k : prefix + "." + k, out);
        }
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            flatten(j[i], prefix + "." + std::to_string(i), out);
        }
    } else if (j.is_number_float()) {
        out << prefix << ',' << ex::format_double(j.get<double>()) << '\n';
    } else if (j.is_string()) {
        out << prefix << ',' << j.get<std::string>() << '\n';
    } else {
        out << prefix << ',' << j.dump() << '\n';
    }
}

void emit_document(const ex::Scenario& s, const json& doc) {
    emit(s.output.path, [&](std::ostream& out) {
        if (s.output.format == "json") {
            out << doc.dump(2) << '\n';
        } else {
            out << "quantity,value\n";
            flatten(doc, "", out);
        }
    });
}

void emit_table(const ex::Scenario& s, const ex::Table& t) {
    emit(s.output.path, [&](std::ostream& out) {
        if (s.output.format == "json") {
            out << ex::to_json(t).dump(2) << '\n';
        } else {
            ex::write_csv(out, t);
        }
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Market equilibrium with a disclosed value range"};
    app.require_subcommand(1);
    app.fallthrough();

    Flags f;
    std::uint64_t seed_value = 42;
    std::size_t nodes_value = 0;
    std::size_t samples_value = 0;
    app.add_option("--config", f.config, "Scenario file (JSON)")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed_value, "Seed for verification and Monte Carlo");
    app.add_option("--out", f.out, "Output file (default stdout)");
    app.add_option("--format", f.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--quad", f.quad, "Expectation method")
        ->check(CLI::IsMember({"adaptive", "hermite", "mc"}));
    auto* nodes_opt = app.add_option("--nodes", nodes_value, "Gauss-Hermite nodes");
    auto* samples_opt = app.add_option("--samples", samples_value, "Monte Carlo samples");
    app.add_option("--verbosity", f.verbosity, "Report detail")
        ->check(CLI::IsMember({"quiet", "normal", "debug"}));
    app.add_option("--echo-config", f.echo_config, "Write the effective configuration here");

    auto* equilibrium = app.add_subcommand("equilibrium", "Coefficients, residuals and prices");
    auto* price_curve = app.add_subcommand("price-curve", "Price and signal sensitivity curve");
    auto* liquidity_curve = app.add_subcommand("liquidity-curve", "Liquidity curve");
    auto* premium = app.add_subcommand("premium", "Premium report");
    auto* verify = app.add_subcommand("verify", "Run every property check");
    auto* sweep = app.add_subcommand("sweep", "Derived quantities along one input");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }
    if (seed_opt->count() > 0) {
        f.seed = seed_value;
    }
    if (nodes_opt->count() > 0) {
        f.nodes = nodes_value;
    }
    if (samples_opt->count() > 0) {
        f.samples = samples_value;
    }

    try {
        if (verify->parsed()) {
            ex::VerifyOptions opts;
            opts.seed = f.seed.value_or(42);
            if (f.samples) {
                opts.mc_samples = *f.samples;
            }
            const ex::Verbosity level = ex::parse_verbosity(f.verbosity);
            const ex::VerifyReport report = ex::run_verify(opts);
            const std::string text = report.to_text(level);
            if (f.out.empty() && f.format == "json") {
                std::cout << report.to_json().dump(2) << '\n';
            } else {
                std::cout << text;
                if (!f.out.empty()) {
                    emit(f.out, [&](std::ostream& out) { out << report.to_json().dump(2) << '\n'; });
                }
            }
            return report.all_passed() ? kOk : kVerify;
        }

        const bool liquidity = liquidity_curve->parsed();
        const ex::Scenario s = build_scenario(
            f, liquidity ? ex::liquidity_curve_defaults() : ex::price_curve_defaults());
        if (equilibrium->parsed()) {
            emit_document(s, ex::run_equilibrium(s));
            return kOk;
        }
        if (price_curve->parsed()) {
            emit_table(s, ex::run_price_curve(s));
            return kOk;
        }
        if (liquidity) {
            emit_table(s, ex::run_liquidity_curve(s));
            return kOk;
        }
        if (premium->parsed()) {
            const json doc = ex::run_premium_report(s);
            emit_document(s, doc);
            return doc.at("flagged").get<bool>() ? kNumerical : kOk;
        }
        if (sweep->parsed()) {
            const ex::Table t = ex::run_sweep(s);
            emit_table(s, t);
            return t.flagged ? kNumerical : kOk;
        }
    } catch (const ex::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfig;
    } catch (const rangeeq::InvalidParameter& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
    return kOk;
}
