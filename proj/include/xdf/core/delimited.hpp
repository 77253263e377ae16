#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace xdf {

/// Comma-delimited table with a header row. Fields carry no quoting; the
/// bundled file formats never embed commas.
struct DelimitedTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers; // 1-based source line per row

    std::size_t column_index(const std::string& name) const; // throws IoError
};

DelimitedTable read_delimited(const std::filesystem::path& path);

} // namespace xdf
