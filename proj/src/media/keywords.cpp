#include "xdf/media/keywords.hpp"

#include "xdf/core/text.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace xdf::media {

namespace {

const std::map<std::string, std::string>& lemma_exceptions() {
    static const std::map<std::string, std::string> table = {
        {"men", "man"},       {"women", "woman"}, {"children", "child"}, {"people", "person"},
        {"feet", "foot"},     {"teeth", "tooth"}, {"geese", "goose"},    {"mice", "mouse"},
        {"indices", "index"}, {"analyses", "analysis"},
    };
    return table;
}

bool ends_with(const std::string& token, const char* suffix) {
    const std::size_t len = std::char_traits<char>::length(suffix);
    return token.size() >= len && token.compare(token.size() - len, len, suffix) == 0;
}

} // namespace

std::string lemmatize_noun(const std::string& token) {
    auto it = lemma_exceptions().find(token);
    if (it != lemma_exceptions().end()) {
        return it->second;
    }
    if (token.size() > 3 && ends_with(token, "ies")) {
        return token.substr(0, token.size() - 3) + "y";
    }
    for (const char* suffix : {"sses", "shes", "ches", "xes", "zes"}) {
        if (token.size() > 4 && ends_with(token, suffix)) {
            return token.substr(0, token.size() - 2);
        }
    }
    if (token.size() > 3 && ends_with(token, "ses")) {
        return token.substr(0, token.size() - 2); // buses -> bus
    }
    if (token.size() > 2 && token.back() == 's' && !ends_with(token, "ss")) {
        return token.substr(0, token.size() - 1);
    }
    return token;
}

std::vector<KeywordStat> extract_keywords(std::span<const MediaEvent> events,
                                          const std::unordered_set<std::string>& stopwords,
                                          const std::unordered_set<std::string>& noun_lexicon) {
    struct Accumulator {
        std::size_t frequency = 0;
        std::set<std::string> event_ids;
    };
    std::map<std::string, Accumulator> lemmas;
    for (const auto& event : events) {
        for (const auto& token : tokenize_alpha(event.title + " " + event.body)) {
            if (stopwords.count(token) != 0) {
                continue;
            }
            const std::string lemma = lemmatize_noun(token);
            if (noun_lexicon.count(lemma) == 0 || stopwords.count(lemma) != 0) {
                continue;
            }
            auto& acc = lemmas[lemma];
            ++acc.frequency;
            acc.event_ids.insert(event.id);
        }
    }
    std::vector<KeywordStat> stats;
    stats.reserve(lemmas.size());
    for (auto& [lemma, acc] : lemmas) {
        KeywordStat stat;
        stat.lemma = lemma;
        stat.frequency = acc.frequency;
        stat.supporting_event_ids.assign(acc.event_ids.begin(), acc.event_ids.end());
        stats.push_back(std::move(stat));
    }
    std::sort(stats.begin(), stats.end(), [](const KeywordStat& a, const KeywordStat& b) {
        if (a.frequency != b.frequency) {
            return a.frequency > b.frequency;
        }
        return a.lemma < b.lemma;
    });
    return stats;
}

} // namespace xdf::media
