#pragma once

#include <string>
#include <variant>
#include <vector>

namespace semiscat {

/// CSV table with a header row and fixed 17-significant-digit formatting,
/// so repeated runs are byte-identical.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    void add_row(const std::vector<std::variant<double, std::string>>& cells);
    void write(const std::string& path) const;
    std::string to_string() const;
    std::size_t n_rows() const { return rows_.size(); }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

/// Canonical number formatting used across all emitted files.
std::string format_double(double v);

/// Creates the directory (and parents) if missing.
void ensure_directory(const std::string& path);

} // namespace semiscat
