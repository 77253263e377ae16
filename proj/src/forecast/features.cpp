#include "xdf/forecast/features.hpp"

#include "xdf/core/error.hpp"
#include "xdf/core/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace xdf::forecast {

namespace {

struct SourceView {
    const MonthlySeries* base = nullptr;
    SeriesSource source;
    const SeriesBundle* bundle = nullptr;

    /// Value of the (possibly derived) series at month m together with the
    /// underlying observation months.
    std::optional<std::pair<double, std::vector<Month>>> at(Month m) const {
        switch (source) {
            case SeriesSource::plan_demand_ratio: {
                auto demand = bundle->demand->quantities.at(m);
                auto plan = bundle->plan ? bundle->plan->at(m) : std::nullopt;
                if (!demand || !plan || std::abs(*plan) < 1e-12) {
                    return std::nullopt;
                }
                return {{*demand / *plan, {m}}};
            }
            case SeriesSource::gdp_delta: {
                if (bundle->gdp == nullptr) {
                    return std::nullopt;
                }
                auto now = bundle->gdp->at(m);
                auto then = bundle->gdp->at(m.plus_months(-12));
                if (!now || !then) {
                    return std::nullopt;
                }
                return {{*now - *then, {m.plus_months(-12), m}}};
            }
            default: {
                if (base == nullptr) {
                    return std::nullopt;
                }
                auto value = base->at(m);
                if (!value) {
                    return std::nullopt;
                }
                return {{*value, {m}}};
            }
        }
    }
};

SourceView make_view(const SeriesBundle& bundle, SeriesSource source, const std::string& feature_id) {
    SourceView view;
    view.source = source;
    view.bundle = &bundle;
    switch (source) {
        case SeriesSource::demand:
        case SeriesSource::plan_demand_ratio:
            if (bundle.demand == nullptr) {
                raise(Errc::missing_data, "feature " + feature_id + ": no demand series");
            }
            view.base = &bundle.demand->quantities;
            break;
        case SeriesSource::plan:
            if (bundle.plan == nullptr) {
                raise(Errc::missing_data, "feature " + feature_id + ": no planned-sales series");
            }
            view.base = bundle.plan;
            break;
        case SeriesSource::gdp:
        case SeriesSource::gdp_delta:
            if (bundle.gdp == nullptr) {
                raise(Errc::missing_data, "feature " + feature_id + ": no GDP series");
            }
            view.base = bundle.gdp;
            break;
        case SeriesSource::pmi:
            if (bundle.pmi == nullptr) {
                raise(Errc::missing_data, "feature " + feature_id + ": no PMI series");
            }
            view.base = bundle.pmi;
            break;
        case SeriesSource::ue:
            if (bundle.ue == nullptr) {
                raise(Errc::missing_data, "feature " + feature_id + ": no unemployment series");
            }
            view.base = bundle.ue;
            break;
    }
    return view;
}

std::pair<double, std::vector<Month>> value_at_or_throw(const SourceView& view, Month m,
                                                        const std::string& feature_id) {
    auto value = view.at(m);
    if (!value) {
        raise(Errc::missing_data, "feature " + feature_id + ": no observation for " + m.str());
    }
    return *value;
}

} // namespace

const char* to_string(SeriesSource source) {
    switch (source) {
        case SeriesSource::demand: return "demand";
        case SeriesSource::plan: return "plan";
        case SeriesSource::gdp: return "gdp";
        case SeriesSource::pmi: return "pmi";
        case SeriesSource::ue: return "ue";
        case SeriesSource::plan_demand_ratio: return "plan_demand_ratio";
        case SeriesSource::gdp_delta: return "gdp_delta";
    }
    return "?";
}

const char* to_string(Aggregation aggregation) {
    switch (aggregation) {
        case Aggregation::raw: return "raw";
        case Aggregation::working_day_average: return "working-day-average";
        case Aggregation::past_weighted_average: return "past-weighted-average";
        case Aggregation::min_max_scaled: return "min-max-scaled";
    }
    return "?";
}

SeriesSource parse_series_source(const std::string& name) {
    for (auto source : {SeriesSource::demand, SeriesSource::plan, SeriesSource::gdp, SeriesSource::pmi,
                        SeriesSource::ue, SeriesSource::plan_demand_ratio, SeriesSource::gdp_delta}) {
        if (name == to_string(source)) {
            return source;
        }
    }
    raise(Errc::config_error, "unknown series source '" + name + "'");
}

Aggregation parse_aggregation(const std::string& name) {
    for (auto aggregation : {Aggregation::raw, Aggregation::working_day_average,
                             Aggregation::past_weighted_average, Aggregation::min_max_scaled}) {
        if (name == to_string(aggregation)) {
            return aggregation;
        }
    }
    raise(Errc::config_error, "unknown aggregation '" + name + "'");
}

std::vector<FeatureSpec> parse_feature_specs(const nlohmann::json& document) {
    std::vector<FeatureSpec> specs;
    std::map<std::string, std::size_t> by_id;
    for (const auto& entry : document.at("features")) {
        FeatureSpec spec;
        spec.id = entry.at("id").get<std::string>();
        spec.actionable = entry.at("actionable").get<bool>();
        spec.source = parse_series_source(entry.at("source").get<std::string>());
        spec.lags = entry.at("lags").get<std::vector<int>>();
        spec.aggregation = parse_aggregation(entry.at("aggregation").get<std::string>());
        if (entry.contains("weights")) {
            spec.weights = entry.at("weights").get<std::vector<double>>();
        }
        spec.abstraction_leaf = entry.at("abstraction_leaf").get<std::string>();
        if (entry.contains("keywords")) {
            spec.mers_keywords = entry.at("keywords").get<std::vector<std::string>>();
        }
        // keyword reuse: "same_as" copies, "extra_from" appends
        auto resolve = [&](const std::string& ref) -> const std::vector<std::string>& {
            auto it = by_id.find(ref);
            if (it == by_id.end()) {
                raise(Errc::config_error,
                      "feature " + spec.id + " references keywords of undefined feature '" + ref + "'");
            }
            return specs[it->second].mers_keywords;
        };
        if (entry.contains("keywords_same_as")) {
            spec.mers_keywords = resolve(entry.at("keywords_same_as").get<std::string>());
        }
        if (entry.contains("keywords_extra_from")) {
            const auto& extra = resolve(entry.at("keywords_extra_from").get<std::string>());
            spec.mers_keywords.insert(spec.mers_keywords.end(), extra.begin(), extra.end());
        }

        if (spec.lags.empty()) {
            raise(Errc::config_error, "feature " + spec.id + " declares no lags");
        }
        for (int lag : spec.lags) {
            if (lag < 0) {
                raise(Errc::config_error, "feature " + spec.id + " has a negative lag");
            }
        }
        if (spec.aggregation == Aggregation::past_weighted_average) {
            if (spec.weights.size() != spec.lags.size()) {
                raise(Errc::config_error, "feature " + spec.id + " needs one weight per lag");
            }
            double total = 0.0;
            for (double w : spec.weights) {
                total += w;
            }
            if (std::abs(total - 1.0) > 1e-9) {
                raise(Errc::config_error, "feature " + spec.id + " weights must sum to 1");
            }
        } else if (spec.lags.size() != 1) {
            raise(Errc::config_error, "feature " + spec.id + " aggregation takes exactly one lag");
        }
        if (spec.mers_keywords.empty()) {
            raise(Errc::config_error, "feature " + spec.id + " has no query keywords");
        }
        if (by_id.count(spec.id) != 0) {
            raise(Errc::config_error, "duplicate feature id " + spec.id);
        }
        by_id[spec.id] = specs.size();
        specs.push_back(std::move(spec));
    }
    return specs;
}

std::vector<FeatureSpec> load_feature_specs(const std::filesystem::path& path) {
    return parse_feature_specs(nlohmann::json::parse(read_file(path)));
}

std::vector<double> FeatureVector::numeric() const {
    std::vector<double> x;
    x.reserve(values.size());
    for (const auto& value : values) {
        x.push_back(value.value);
    }
    return x;
}

FeatureVector build_feature_vector(const SeriesBundle& bundle, Month target,
                                   std::span<const FeatureSpec> specs) {
    FeatureVector fv;
    fv.material = bundle.demand ? bundle.demand->material : "";
    fv.target = target;
    for (const auto& spec : specs) {
        SourceView view = make_view(bundle, spec.source, spec.id);
        FeatureValue out;
        out.feature_id = spec.id;
        std::set<Month> refs;
        switch (spec.aggregation) {
            case Aggregation::raw: {
                auto [value, months] = value_at_or_throw(view, target.plus_months(-spec.lags[0]), spec.id);
                out.value = value;
                refs.insert(months.begin(), months.end());
                break;
            }
            case Aggregation::working_day_average: {
                const Month m = target.plus_months(-spec.lags[0]);
                auto [value, months] = value_at_or_throw(view, m, spec.id);
                if (bundle.working_days == nullptr) {
                    raise(Errc::missing_data, "feature " + spec.id + ": no working-day series");
                }
                auto days = bundle.working_days->counts.at(m);
                if (!days || *days <= 0) {
                    raise(Errc::missing_data, "feature " + spec.id + ": no working-day count for " + m.str());
                }
                out.value = value / *days;
                refs.insert(months.begin(), months.end());
                break;
            }
            case Aggregation::past_weighted_average: {
                double sum = 0.0;
                for (std::size_t i = 0; i < spec.lags.size(); ++i) {
                    auto [value, months] =
                        value_at_or_throw(view, target.plus_months(-spec.lags[i]), spec.id);
                    sum += spec.weights[i] * value;
                    refs.insert(months.begin(), months.end());
                }
                out.value = sum;
                break;
            }
            case Aggregation::min_max_scaled: {
                auto [value, months] = value_at_or_throw(view, target.plus_months(-spec.lags[0]), spec.id);
                double lo = 0.0;
                double hi = 0.0;
                bool any = false;
                // scaling bounds from the source's history strictly before the target
                for (const auto& [m, v] : view.base->points) {
                    if (!(m < target)) {
                        break;
                    }
                    auto derived = view.at(m);
                    if (!derived) {
                        continue;
                    }
                    if (!any) {
                        lo = hi = derived->first;
                        any = true;
                    } else {
                        lo = std::min(lo, derived->first);
                        hi = std::max(hi, derived->first);
                    }
                }
                if (!any) {
                    raise(Errc::missing_data, "feature " + spec.id + ": no history to scale against");
                }
                out.value = hi - lo < 1e-12 ? 0.5 : (value - lo) / (hi - lo);
                refs.insert(months.begin(), months.end());
                break;
            }
        }
        for (Month m : refs) {
            if (!(m < target)) {
                raise(Errc::config_error, "feature " + spec.id + " references " + m.str() +
                                              ", not strictly before target " + target.str());
            }
            out.reference_months.push_back(m);
        }
        fv.values.push_back(std::move(out));
    }
    return fv;
}

} // namespace xdf::forecast
