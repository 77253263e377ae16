#pragma once

#include "xdf/media/events.hpp"

#include <span>
#include <string>
#include <unordered_set>
#include <vector>

namespace xdf::media {

struct KeywordStat {
    std::string lemma;
    std::size_t frequency = 0;
    std::vector<std::string> supporting_event_ids; // sorted unique
};

/// Singular noun lemma for a lowercase token: exception table first
/// (men -> man, ...), then plural suffix rules (ies -> y, Ces -> C for
/// sibilant stems, trailing s dropped otherwise).
std::string lemmatize_noun(const std::string& token);

/// Tokenizes title+body of every event, drops stopwords, lemmatizes and
/// keeps lemmas accepted by the noun lexicon. Aggregated counts sorted by
/// frequency descending, then lemma ascending.
std::vector<KeywordStat> extract_keywords(std::span<const MediaEvent> events,
                                          const std::unordered_set<std::string>& stopwords,
                                          const std::unordered_set<std::string>& noun_lexicon);

} // namespace xdf::media
