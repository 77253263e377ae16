#include "xdf/forecast/series.hpp"

#include "xdf/core/delimited.hpp"
#include "xdf/core/error.hpp"

#include <algorithm>
#include <charconv>

namespace xdf::forecast {

namespace {

double parse_number(const std::string& raw, const std::string& context) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc{} || ptr != raw.data() + raw.size()) {
        raise(Errc::io_error, context + ": not a number: '" + raw + "'");
    }
    return value;
}

} // namespace

std::optional<double> MonthlySeries::at(Month m) const {
    auto it = std::lower_bound(points.begin(), points.end(), m,
                               [](const auto& point, Month key) { return point.first < key; });
    if (it == points.end() || it->first != m) {
        return std::nullopt;
    }
    return it->second;
}

void MonthlySeries::append(Month m, double value) {
    if (!points.empty() && !(points.back().first < m)) {
        raise(Errc::io_error, "months must be strictly increasing, got " + m.str() + " after " +
                                  points.back().first.str());
    }
    points.emplace_back(m, value);
}

std::map<std::string, DemandSeries> load_demand(const std::filesystem::path& path) {
    auto table = read_delimited(path);
    const auto mat = table.column_index("material_id");
    const auto mon = table.column_index("month");
    const auto qty = table.column_index("quantity");
    std::map<std::string, DemandSeries> result;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::string context = path.string() + ":" + std::to_string(table.line_numbers[i]);
        double quantity = parse_number(row[qty], context);
        if (quantity < 0) {
            raise(Errc::io_error, context + ": negative demand");
        }
        auto& series = result[row[mat]];
        series.material = row[mat];
        series.quantities.append(Month::parse(row[mon]), quantity);
    }
    return result;
}

std::vector<IndicatorSeries> load_indicators(const std::filesystem::path& path) {
    auto table = read_delimited(path);
    const auto ind = table.column_index("indicator");
    const auto reg = table.column_index("region");
    const auto mon = table.column_index("month");
    const auto val = table.column_index("value");
    std::map<std::pair<std::string, std::string>, IndicatorSeries> grouped;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::string context = path.string() + ":" + std::to_string(table.line_numbers[i]);
        if (row[ind] != "GDP" && row[ind] != "PMI" && row[ind] != "UE") {
            raise(Errc::io_error, context + ": indicator must be GDP, PMI or UE");
        }
        auto& series = grouped[{row[ind], row[reg]}];
        series.indicator = row[ind];
        series.region = row[reg];
        series.values.append(Month::parse(row[mon]), parse_number(row[val], context));
    }
    std::vector<IndicatorSeries> result;
    for (auto& [key, series] : grouped) {
        result.push_back(std::move(series));
    }
    return result;
}

std::map<std::string, MonthlySeries> load_plan(const std::filesystem::path& path) {
    auto table = read_delimited(path);
    const auto mat = table.column_index("material_id");
    const auto mon = table.column_index("month");
    const auto qty = table.column_index("planned_qty");
    std::map<std::string, MonthlySeries> result;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::string context = path.string() + ":" + std::to_string(table.line_numbers[i]);
        result[row[mat]].append(Month::parse(row[mon]), parse_number(row[qty], context));
    }
    return result;
}

WorkingDaySeries load_working_days(const std::filesystem::path& path) {
    auto table = read_delimited(path);
    const auto mon = table.column_index("month");
    const auto cnt = table.column_index("count");
    WorkingDaySeries result;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::string context = path.string() + ":" + std::to_string(table.line_numbers[i]);
        result.counts.append(Month::parse(row[mon]), parse_number(row[cnt], context));
    }
    return result;
}

} // namespace xdf::forecast
