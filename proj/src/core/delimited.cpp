#include "xdf/core/delimited.hpp"

#include "xdf/core/error.hpp"

#include <algorithm>
#include <fstream>

namespace xdf {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

} // namespace

std::size_t DelimitedTable::column_index(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) {
        raise(Errc::io_error, "missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - columns.begin());
}

DelimitedTable read_delimited(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        raise(Errc::io_error, "cannot open " + path.string());
    }
    DelimitedTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto fields = split_fields(line);
        if (table.columns.empty()) {
            table.columns = std::move(fields);
            continue;
        }
        if (fields.size() != table.columns.size()) {
            raise(Errc::io_error, path.string() + ":" + std::to_string(line_no) +
                                      ": expected " + std::to_string(table.columns.size()) +
                                      " fields, got " + std::to_string(fields.size()));
        }
        table.rows.push_back(std::move(fields));
        table.line_numbers.push_back(line_no);
    }
    if (table.columns.empty()) {
        raise(Errc::io_error, path.string() + ": empty file");
    }
    return table;
}

} // namespace xdf
