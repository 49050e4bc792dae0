#include "rangeeq/experiment/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string_view>

#include "rangeeq/errors.hpp"

namespace rangeeq::experiment {

using nlohmann::json;

namespace {

void reject_unknown(const json& section, std::string_view name,
                    std::initializer_list<std::string_view> allowed) {
    if (!section.is_object()) {
        throw ConfigError("section '" + std::string(name) + "' must be an object");
    }
    for (const auto& [key, value] : section.items()) {
        bool known = false;
        for (std::string_view a : allowed) {
            known = known || key == a;
        }
        if (!known) {
            throw ConfigError("unknown key '" + key + "' in section '" + std::string(name) + "'");
        }
    }
}

void read_number(const json& section, std::string_view section_name, const char* key,
                 double& out) {
    if (!section.contains(key)) {
        return;
    }
    const json& v = section.at(key);
    if (!v.is_number()) {
        throw ConfigError(std::string(section_name) + "." + key + " must be a number");
    }
    out = v.get<double>();
    if (!std::isfinite(out)) {
        throw ConfigError(std::string(section_name) + "." + key + " must be finite");
    }
}

template <typename Int>
void read_integer(const json& section, std::string_view section_name, const char* key, Int& out) {
    if (!section.contains(key)) {
        return;
    }
    const json& v = section.at(key);
    const bool non_negative =
        v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
    if (!non_negative) {
        throw ConfigError(std::string(section_name) + "." + key +
                          " must be a non-negative integer");
    }
    out = v.get<Int>();
}

void read_string(const json& section, std::string_view section_name, const char* key,
                 std::string& out) {
    if (!section.contains(key)) {
        return;
    }
    const json& v = section.at(key);
    if (!v.is_string()) {
        throw ConfigError(std::string(section_name) + "." + key + " must be a string");
    }
    out = v.get<std::string>();
}

constexpr std::string_view kAxes[] = {"u_tilde", "y_tilde", "gamma", "mu0", "sigma_u2",
                                      "sigma_eps2", "sigma_y2", "x_I", "Z", "D0",
                                      "lower", "upper", "midpoint", "length"};

}  // namespace

std::vector<double> SweepSpec::values() const {
    std::vector<double> out(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        // Both ends exact; interior points by linear interpolation.
        const double f = static_cast<double>(i) / static_cast<double>(steps - 1);
        out[static_cast<std::size_t>(i)] = i == steps - 1 ? stop : start + f * (stop - start);
    }
    return out;
}

MarketState SweepSpec::state_at(double value) const {
    MarketState s{u_tilde, y_tilde};
    if (axis == "u_tilde") {
        s.u_tilde = value;
    } else if (axis == "y_tilde") {
        s.y_tilde = value;
    }
    return s;
}

Scenario price_curve_defaults() {
    Scenario s;
    s.range = Range{22.0, 28.0};
    return s;
}

Scenario liquidity_curve_defaults() {
    Scenario s;
    s.range = Range{23.0, 27.0};
    return s;
}

QuadratureMethod parse_quadrature_method(const std::string& name) {
    if (name == "adaptive") {
        return QuadratureMethod::Adaptive;
    }
    if (name == "hermite") {
        return QuadratureMethod::GaussHermite;
    }
    if (name == "mc") {
        return QuadratureMethod::MonteCarlo;
    }
    throw ConfigError("unknown quadrature method '" + name + "' (adaptive, hermite, mc)");
}

Scenario parse_scenario(const json& doc, Scenario base) {
    if (!doc.is_object()) {
        throw ConfigError("configuration must be a JSON object");
    }
    reject_unknown(doc, "top level", {"market", "range", "sweep", "quadrature", "output"});
    Scenario s = std::move(base);

    if (doc.contains("market")) {
        const json& m = doc.at("market");
        reject_unknown(m, "market",
                       {"gamma", "mu0", "sigma_u2", "sigma_eps2", "sigma_y2", "x_I", "Z", "D0"});
        read_number(m, "market", "gamma", s.market.gamma);
        read_number(m, "market", "mu0", s.market.mu0);
        read_number(m, "market", "sigma_u2", s.market.sigma_u2);
        read_number(m, "market", "sigma_eps2", s.market.sigma_eps2);
        read_number(m, "market", "sigma_y2", s.market.sigma_y2);
        read_number(m, "market", "x_I", s.market.x_I);
        read_number(m, "market", "Z", s.market.Z);
        read_number(m, "market", "D0", s.market.D0);
    }
    try {
        s.market.validate();
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("market: ") + e.what());
    }

    if (doc.contains("range")) {
        const json& r = doc.at("range");
        if (r.is_null()) {
            s.range.reset();
        } else {
            reject_unknown(r, "range", {"lower", "upper"});
            if (!r.contains("lower") || !r.contains("upper")) {
                throw ConfigError("range needs both lower and upper");
            }
            Range range;
            read_number(r, "range", "lower", range.lower);
            read_number(r, "range", "upper", range.upper);
            s.range = range;
        }
    }
    if (s.range) {
        try {
            make_kernel(s.market, *s.range);
        } catch (const DomainError& e) {
            throw ConfigError(std::string("range: ") + e.what());
        }
    }

    if (doc.contains("sweep")) {
        const json& w = doc.at("sweep");
        reject_unknown(w, "sweep",
                       {"axis", "start", "stop", "steps", "u_tilde", "y_tilde", "quantities"});
        read_string(w, "sweep", "axis", s.sweep.axis);
        read_number(w, "sweep", "start", s.sweep.start);
        read_number(w, "sweep", "stop", s.sweep.stop);
        read_integer(w, "sweep", "steps", s.sweep.steps);
        read_number(w, "sweep", "u_tilde", s.sweep.u_tilde);
        read_number(w, "sweep", "y_tilde", s.sweep.y_tilde);
        if (w.contains("quantities")) {
            const json& q = w.at("quantities");
            if (!q.is_array()) {
                throw ConfigError("sweep.quantities must be an array of names");
            }
            s.sweep.quantities.clear();
            for (const json& name : q) {
                if (!name.is_string()) {
                    throw ConfigError("sweep.quantities must be an array of names");
                }
                s.sweep.quantities.push_back(name.get<std::string>());
            }
        }
    }
    if (s.sweep.steps < 2) {
        throw ConfigError("sweep.steps must be at least 2");
    }
    bool axis_known = false;
    for (std::string_view a : kAxes) {
        axis_known = axis_known || s.sweep.axis == a;
    }
    if (!axis_known) {
        throw ConfigError("unknown sweep axis '" + s.sweep.axis + "'");
    }

    if (doc.contains("quadrature")) {
        const json& q = doc.at("quadrature");
        reject_unknown(q, "quadrature", {"method", "count", "seed", "target_se"});
        if (q.contains("method")) {
            std::string name;
            read_string(q, "quadrature", "method", name);
            s.quad.method = parse_quadrature_method(name);
        }
        read_integer(q, "quadrature", "count", s.quad.nodes_or_samples);
        read_integer(q, "quadrature", "seed", s.quad.seed);
        read_number(q, "quadrature", "target_se", s.quad.target_se);
    }
    try {
        s.quad.validate();
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("quadrature: ") + e.what());
    }

    if (doc.contains("output")) {
        const json& o = doc.at("output");
        reject_unknown(o, "output", {"path", "format"});
        read_string(o, "output", "path", s.output.path);
        read_string(o, "output", "format", s.output.format);
    }
    if (s.output.format != "csv" && s.output.format != "json") {
        throw ConfigError("output.format must be csv or json");
    }
    return s;
}

Scenario load_scenario(const std::string& path, Scenario base) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_scenario(doc, std::move(base));
}

json to_json(const Scenario& s) {
    json doc;
    doc["market"] = {{"gamma", s.market.gamma},           {"mu0", s.market.mu0},
                     {"sigma_u2", s.market.sigma_u2},     {"sigma_eps2", s.market.sigma_eps2},
                     {"sigma_y2", s.market.sigma_y2},     {"x_I", s.market.x_I},
                     {"Z", s.market.Z},                   {"D0", s.market.D0}};
    doc["range"] = s.range ? json{{"lower", s.range->lower}, {"upper", s.range->upper}} : json();
    doc["sweep"] = {{"axis", s.sweep.axis},       {"start", s.sweep.start},
                    {"stop", s.sweep.stop},       {"steps", s.sweep.steps},
                    {"u_tilde", s.sweep.u_tilde}, {"y_tilde", s.sweep.y_tilde},
                    {"quantities", s.sweep.quantities}};
    doc["quadrature"] = {{"method", to_string(s.quad.method)},
                         {"count", s.quad.nodes_or_samples},
                         {"seed", s.quad.seed},
                         {"target_se", s.quad.target_se}};
    doc["output"] = {{"path", s.output.path}, {"format", s.output.format}};
    return doc;
}

}  // namespace rangeeq::experiment
