#pragma once

#include "xdf/core/time.hpp"
#include "xdf/forecast/features.hpp"

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace xdf::media {

struct EventQuery {
    std::vector<std::string> keywords;
    Date start;
    Date end;
    std::string feature_id; // provenance back to the ranked feature
    Month reference;
};

struct MediaEvent {
    std::string id;
    Date date;
    std::string title;
    std::string body;
    std::string source;
};

/// Client contract for media-event retrieval: adapters for real services
/// implement this; the bundled backend serves a fixture file.
class EventBackend {
public:
    virtual ~EventBackend() = default;

    /// Events dated within [start, end] whose title or body contains at
    /// least one keyword (case-insensitive whole-phrase match), sorted by
    /// (date, id), at most `limit` entries.
    virtual std::vector<MediaEvent> query(std::span<const std::string> keywords, Date start, Date end,
                                          std::size_t limit) const = 0;
};

class FixtureEventBackend : public EventBackend {
public:
    explicit FixtureEventBackend(std::vector<MediaEvent> events);
    static FixtureEventBackend from_jsonl(const std::filesystem::path& path);

    std::vector<MediaEvent> query(std::span<const std::string> keywords, Date start, Date end,
                                  std::size_t limit) const override;

    const std::vector<MediaEvent>& events() const { return events_; }

private:
    std::vector<MediaEvent> events_; // sorted by (date, id)
};

/// One query per (ranked feature, reference month): the window spans the
/// reference month's mid day +/- closeness_days and the keywords are the
/// feature's expanded spec list. Throws UnknownFeature when a ranked id has
/// no spec or no recorded reference months.
std::vector<EventQuery> build_queries(std::span<const std::pair<std::string, double>> ranked,
                                      std::span<const forecast::FeatureSpec> specs,
                                      const forecast::FeatureVector& instance, int closeness_days);

std::vector<MediaEvent> retrieve_events(const EventQuery& query, const EventBackend& backend,
                                        std::size_t limit);

} // namespace xdf::media
