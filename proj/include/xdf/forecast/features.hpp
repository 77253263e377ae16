#pragma once

#include "xdf/forecast/series.hpp"

#include "json.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace xdf::forecast {

/// Base and derived monthly series a feature can draw from. Derived sources:
///   plan_demand_ratio(m) = demand(m) / plan(m)        (missing when plan ~ 0)
///   gdp_delta(m)         = gdp(m) - gdp(m - 12)       (year-over-year change)
enum class SeriesSource {
    demand,
    plan,
    gdp,
    pmi,
    ue,
    plan_demand_ratio,
    gdp_delta,
};

enum class Aggregation {
    raw,                   // single lag, value as-is
    working_day_average,   // demand(t-lag) / working_days(t-lag)
    past_weighted_average, // sum of weights[i] * source(t-lags[i])
    min_max_scaled,        // raw value scaled by the source's min/max strictly before t
};

const char* to_string(SeriesSource source);
const char* to_string(Aggregation aggregation);
SeriesSource parse_series_source(const std::string& name);
Aggregation parse_aggregation(const std::string& name);

struct FeatureSpec {
    std::string id; // single letter A..M in the bundled configuration
    bool actionable = false;
    SeriesSource source = SeriesSource::demand;
    std::vector<int> lags;       // months, all >= 0
    Aggregation aggregation = Aggregation::raw;
    std::vector<double> weights; // past_weighted_average only; sums to 1
    std::vector<std::string> mers_keywords;
    std::string abstraction_leaf;
};

/// Parses the feature-spec document and expands keyword references ("same_as"
/// reuses another feature's full list, "extra_from" appends it). Validates
/// the per-spec invariants.
std::vector<FeatureSpec> parse_feature_specs(const nlohmann::json& document);
std::vector<FeatureSpec> load_feature_specs(const std::filesystem::path& path);

struct FeatureValue {
    std::string feature_id;
    double value = 0.0;
    std::vector<Month> reference_months; // ascending, all strictly before the target
};

struct FeatureVector {
    std::string material;
    Month target;
    std::vector<FeatureValue> values; // one per spec, in spec order

    std::vector<double> numeric() const;
};

/// Input series for one material.
struct SeriesBundle {
    const DemandSeries* demand = nullptr;
    const MonthlySeries* plan = nullptr;
    const WorkingDaySeries* working_days = nullptr;
    const MonthlySeries* gdp = nullptr;
    const MonthlySeries* pmi = nullptr;
    const MonthlySeries* ue = nullptr;
};

/// Computes one value per spec for the target month. Every reference month
/// used is recorded and must lie strictly before the target; min-max scaling
/// likewise only sees observations before the target. Throws MissingData
/// naming the feature and the missing month.
FeatureVector build_feature_vector(const SeriesBundle& bundle, Month target,
                                   std::span<const FeatureSpec> specs);

} // namespace xdf::forecast
