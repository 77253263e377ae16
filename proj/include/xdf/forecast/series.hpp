#pragma once

#include "xdf/core/time.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace xdf::forecast {

/// Monthly observations with strictly increasing months.
struct MonthlySeries {
    std::vector<std::pair<Month, double>> points;

    std::optional<double> at(Month m) const;
    bool empty() const { return points.empty(); }
    Month first_month() const { return points.front().first; }
    Month last_month() const { return points.back().first; }
    void append(Month m, double value); // enforces ordering
};

struct DemandSeries {
    std::string material;
    MonthlySeries quantities; // >= 0
};

struct IndicatorSeries {
    std::string indicator; // GDP, PMI or UE
    std::string region;
    MonthlySeries values;
};

struct WorkingDaySeries {
    MonthlySeries counts;
};

std::map<std::string, DemandSeries> load_demand(const std::filesystem::path& path);
std::vector<IndicatorSeries> load_indicators(const std::filesystem::path& path);
std::map<std::string, MonthlySeries> load_plan(const std::filesystem::path& path);
WorkingDaySeries load_working_days(const std::filesystem::path& path);

} // namespace xdf::forecast
