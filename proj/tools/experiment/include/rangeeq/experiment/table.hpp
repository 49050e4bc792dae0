#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace rangeeq::experiment {

/// Column-named rows of doubles.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    bool flagged = false;  // some Monte Carlo estimate missed its target

    std::size_t column_index(const std::string& name) const;
    std::vector<double> column(const std::string& name) const;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Header row then one line per row, values in round-trip precision.
void write_csv(std::ostream& out, const Table& table);

/// {"columns": [...], "rows": [[...], ...]}
nlohmann::json to_json(const Table& table);

}  // namespace rangeeq::experiment
