#include "xdf/media/events.hpp"

#include "xdf/core/error.hpp"
#include "xdf/core/text.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>

namespace xdf::media {

FixtureEventBackend::FixtureEventBackend(std::vector<MediaEvent> events) : events_(std::move(events)) {
    std::sort(events_.begin(), events_.end(), [](const MediaEvent& a, const MediaEvent& b) {
        return std::tie(a.date, a.id) < std::tie(b.date, b.id);
    });
    for (std::size_t i = 1; i < events_.size(); ++i) {
        if (events_[i].id == events_[i - 1].id) {
            raise(Errc::io_error, "duplicate event id '" + events_[i].id + "' in fixture");
        }
    }
}

FixtureEventBackend FixtureEventBackend::from_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        raise(Errc::io_error, "cannot open " + path.string());
    }
    std::vector<MediaEvent> events;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
        if (record.is_discarded()) {
            raise(Errc::io_error, path.string() + ":" + std::to_string(line_no) + ": bad record");
        }
        MediaEvent event;
        event.id = record.at("id").get<std::string>();
        event.date = Date::parse(record.at("date").get<std::string>());
        event.title = record.at("title").get<std::string>();
        event.body = record.value("body", "");
        event.source = record.value("source", "");
        events.push_back(std::move(event));
    }
    return FixtureEventBackend(std::move(events));
}

std::vector<MediaEvent> FixtureEventBackend::query(std::span<const std::string> keywords, Date start,
                                                   Date end, std::size_t limit) const {
    std::vector<std::string> lowered;
    lowered.reserve(keywords.size());
    for (const auto& keyword : keywords) {
        lowered.push_back(to_lower(keyword));
    }
    std::vector<MediaEvent> hits;
    if (limit == 0) {
        return hits;
    }
    for (const auto& event : events_) {
        if (event.date < start || end < event.date) {
            continue;
        }
        const std::string haystack = to_lower(event.title + " " + event.body);
        const bool matched = std::any_of(lowered.begin(), lowered.end(), [&](const std::string& phrase) {
            return contains_phrase(haystack, phrase);
        });
        if (matched) {
            hits.push_back(event);
            if (hits.size() == limit) {
                break;
            }
        }
    }
    return hits; // events_ is (date, id) sorted already
}

std::vector<EventQuery> build_queries(std::span<const std::pair<std::string, double>> ranked,
                                      std::span<const forecast::FeatureSpec> specs,
                                      const forecast::FeatureVector& instance, int closeness_days) {
    std::vector<EventQuery> queries;
    for (const auto& [feature_id, contribution] : ranked) {
        (void)contribution;
        auto spec_it = std::find_if(specs.begin(), specs.end(),
                                    [&](const forecast::FeatureSpec& s) { return s.id == feature_id; });
        auto value_it =
            std::find_if(instance.values.begin(), instance.values.end(),
                         [&](const forecast::FeatureValue& v) { return v.feature_id == feature_id; });
        if (spec_it == specs.end() || value_it == instance.values.end()) {
            raise(Errc::unknown_feature, "no spec or feature value for '" + feature_id + "'");
        }
        if (value_it->reference_months.empty()) {
            raise(Errc::unknown_feature, "feature '" + feature_id + "' recorded no reference months");
        }
        for (Month reference : value_it->reference_months) {
            EventQuery query;
            query.keywords = spec_it->mers_keywords;
            query.start = reference.mid_day().plus_days(-closeness_days);
            query.end = reference.mid_day().plus_days(closeness_days);
            query.feature_id = feature_id;
            query.reference = reference;
            queries.push_back(std::move(query));
        }
    }
    return queries;
}

std::vector<MediaEvent> retrieve_events(const EventQuery& query, const EventBackend& backend,
                                        std::size_t limit) {
    return backend.query(query.keywords, query.start, query.end, limit);
}

} // namespace xdf::media
