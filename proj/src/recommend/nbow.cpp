#include "xdf/recommend/nbow.hpp"

#include "xdf/core/error.hpp"
#include "xdf/core/text.hpp"

namespace xdf::recommend {

DocumentBag to_nbow(std::string_view text, const EmbeddingTable& table,
                    const std::unordered_set<std::string>& stopwords) {
    std::map<std::string, double> counts;
    for (const auto& token : tokenize_alpha(text)) {
        if (stopwords.count(token) != 0 || table.find(token) == nullptr) {
            continue;
        }
        counts[token] += 1.0;
    }
    return bag_from_counts(counts, table);
}

DocumentBag bag_from_counts(const std::map<std::string, double>& counts, const EmbeddingTable& table) {
    double total = 0.0;
    for (const auto& [token, count] : counts) {
        if (count > 0.0 && table.find(token) != nullptr) {
            total += count;
        }
    }
    if (total <= 0.0) {
        raise(Errc::empty_bag, "no in-vocabulary tokens");
    }
    DocumentBag bag;
    for (const auto& [token, count] : counts) {
        if (count > 0.0 && table.find(token) != nullptr) {
            bag.tokens.push_back(token);
            bag.weights.push_back(count / total);
        }
    }
    return bag;
}

} // namespace xdf::recommend
