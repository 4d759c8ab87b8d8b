#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace advtrl {

/// Deterministic numeric formatting for CSV/SVG output ("%.10g"; "INF" for
/// +infinity so spreadsheet tools keep the sentinel readable).
std::string format_number(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 when absent
};

void write_csv(const CsvTable& table, const std::filesystem::path& path);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace advtrl
