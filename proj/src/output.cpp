#include "polsq/output.hpp"

#include <cmath>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "polsq/config.hpp"

namespace polsq {

void OutputTable::add_row(std::vector<double> row) {
    if (row.size() != columns.size())
        throw std::logic_error("OutputTable " + name + ": row width does not match the column count");
    rows.push_back(std::move(row));
}

void OutputTable::check() const {
    for (const auto& c : columns)
        if (c.unit.empty()) throw std::logic_error("OutputTable " + name + ": column " + c.name + " has no unit");
    for (const auto& r : rows)
        if (r.size() != columns.size()) throw std::logic_error("OutputTable " + name + ": ragged rows");
}

std::string to_csv(const OutputTable& table, const RunMetadata& meta) {
    table.check();
    std::ostringstream out;
    out << "# polsq " << meta.command << " " << table.name << '\n';
    out << "# version = " << meta.version << '\n';
    out << "# config_hash = " << meta.config_hash << '\n';
    for (const auto& [key, value] : table.metadata) out << "# " << key << " = " << value << '\n';
    out << "# units =";
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? ", " : " ") << table.columns[i].unit;
    out << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i].name;
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
        out << '\n';
    }
    return out.str();
}

std::string to_json(const std::vector<OutputTable>& tables, const RunMetadata& meta) {
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["command"] = meta.command;
    doc["version"] = meta.version;
    doc["config_hash"] = meta.config_hash;
    doc["tables"] = ordered_json::array();
    for (const auto& table : tables) {
        table.check();
        ordered_json t;
        t["name"] = table.name;
        t["metadata"] = ordered_json::object();
        for (const auto& [key, value] : table.metadata) t["metadata"][key] = value;
        t["columns"] = ordered_json::array();
        for (const auto& c : table.columns) t["columns"].push_back({{"name", c.name}, {"unit", c.unit}});
        t["rows"] = ordered_json::array();
        for (const auto& row : table.rows) {
            ordered_json r = ordered_json::array();
            for (double v : row) {
                if (std::isfinite(v))
                    r.push_back(v);
                else
                    r.push_back(nullptr);
            }
            t["rows"].push_back(std::move(r));
        }
        doc["tables"].push_back(std::move(t));
    }
    return doc.dump(2) + "\n";
}

}  // namespace polsq
