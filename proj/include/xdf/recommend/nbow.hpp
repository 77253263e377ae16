#pragma once

#include "xdf/recommend/embedding.hpp"

#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace xdf::recommend {

/// Normalized bag of words: unique in-vocabulary tokens with positive
/// weights summing to 1.
struct DocumentBag {
    std::vector<std::string> tokens; // sorted
    std::vector<double> weights;

    bool operator==(const DocumentBag&) const = default;
};

/// Tokenize + lowercase, drop stopwords and out-of-vocabulary tokens, weight
/// by count / total kept. Throws EmptyBag when nothing survives.
DocumentBag to_nbow(std::string_view text, const EmbeddingTable& table,
                    const std::unordered_set<std::string>& stopwords);

/// Same normalization applied to pre-counted tokens (the query side, where
/// keyword lists arrive with frequencies).
DocumentBag bag_from_counts(const std::map<std::string, double>& counts, const EmbeddingTable& table);

} // namespace xdf::recommend
