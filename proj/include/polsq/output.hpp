#pragma once

#include <string>
#include <utility>
#include <vector>

namespace polsq {

struct Column {
    std::string name;
    std::string unit;
};

/// Rectangular numeric table with declared units. NaN marks an absent value
/// (CSV "nan", JSON null).
struct OutputTable {
    std::string name;
    std::vector<Column> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;

    void add_row(std::vector<double> row);
    /// Throws std::logic_error if any row width differs from the column count
    /// or a unit is missing.
    void check() const;
};

struct RunMetadata {
    std::string command;
    std::string version;
    std::string config_hash;
};

/// `#`-prefixed metadata block, then a header row, then data rows.
std::string to_csv(const OutputTable& table, const RunMetadata& meta);

/// {"command", "version", "config_hash", "tables": [...]} with two-space indent.
std::string to_json(const std::vector<OutputTable>& tables, const RunMetadata& meta);

}  // namespace polsq
