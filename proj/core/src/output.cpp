#include "semiscat/output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "semiscat/errors.hpp"

namespace semiscat {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns)
    : columns_(std::move(columns)) {}

void CsvTable::add_row(const std::vector<std::variant<double, std::string>>& cells) {
    if (cells.size() != columns_.size())
        throw invalid_parameter("CsvTable: row width mismatch");
    std::vector<std::string> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
        if (std::holds_alternative<double>(c))
            row.push_back(format_double(std::get<double>(c)));
        else
            row.push_back(std::get<std::string>(c));
    }
    rows_.push_back(std::move(row));
}

std::string CsvTable::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < columns_.size(); ++i)
        os << columns_[i] << (i + 1 < columns_.size() ? "," : "\n");
    for (const auto& row : rows_)
        for (std::size_t i = 0; i < row.size(); ++i)
            os << row[i] << (i + 1 < row.size() ? "," : "\n");
    return os.str();
}

void CsvTable::write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw error("CsvTable: cannot open " + path);
    f << to_string();
}

void ensure_directory(const std::string& path) {
    std::filesystem::create_directories(path);
}

} // namespace semiscat
