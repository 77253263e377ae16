#include "xdf/recommend/rank.hpp"

#include "xdf/core/error.hpp"
#include "xdf/core/rng.hpp"
#include "xdf/core/text.hpp"
#include "xdf/media/keywords.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>

namespace xdf::recommend {

std::vector<DatasetMetadata> load_dataset_fixture(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        raise(Errc::io_error, "cannot open " + path.string());
    }
    std::vector<DatasetMetadata> entries;
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
        DatasetMetadata entry;
        entry.id = record.at("id").get<std::string>();
        entry.title = record.at("title").get<std::string>();
        entry.description = record.value("description", "");
        entry.publisher = record.value("publisher", "");
        entry.uri = record.value("uri", "");
        if (entry.title.empty()) {
            raise(Errc::io_error, path.string() + ":" + std::to_string(line_no) + ": empty title");
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

FixtureDatasetBackend::FixtureDatasetBackend(std::vector<DatasetMetadata> entries)
    : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const DatasetMetadata& a, const DatasetMetadata& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        if (entries_[i].id == entries_[i - 1].id) {
            raise(Errc::io_error, "duplicate dataset id '" + entries_[i].id + "' in fixture");
        }
    }
    raw_texts_.reserve(entries_.size());
    lemma_sets_.reserve(entries_.size());
    for (const auto& entry : entries_) {
        const std::string text = to_lower(entry.title + " " + entry.description);
        std::unordered_set<std::string> lemmas;
        for (const auto& token : tokenize_alpha(text)) {
            lemmas.insert(media::lemmatize_noun(token));
        }
        raw_texts_.push_back(text);
        lemma_sets_.push_back(std::move(lemmas));
    }
}

FixtureDatasetBackend FixtureDatasetBackend::from_jsonl(const std::filesystem::path& path) {
    return FixtureDatasetBackend(load_dataset_fixture(path));
}

std::vector<DatasetMetadata> FixtureDatasetBackend::query(std::span<const std::string> keywords,
                                                          std::size_t limit) const {
    std::vector<std::pair<std::string, bool>> lowered; // (keyword, is single word)
    for (const auto& keyword : keywords) {
        const std::string low = to_lower(keyword);
        lowered.emplace_back(low, tokenize_alpha(low).size() == 1);
    }
    std::vector<DatasetMetadata> hits;
    if (limit == 0) {
        return hits;
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const bool matched = std::any_of(lowered.begin(), lowered.end(), [&](const auto& entry) {
            const auto& [keyword, single] = entry;
            if (single) {
                const auto tokens = tokenize_alpha(keyword);
                return !tokens.empty() &&
                       lemma_sets_[i].count(media::lemmatize_noun(tokens.front())) != 0;
            }
            return contains_phrase(raw_texts_[i], keyword);
        });
        if (matched) {
            hits.push_back(entries_[i]);
            if (hits.size() == limit) {
                break;
            }
        }
    }
    return hits;
}

std::vector<RankedDataset> rank_datasets(const DocumentBag& query,
                                         std::span<const DatasetMetadata> candidates,
                                         const EmbeddingTable& table,
                                         const std::unordered_set<std::string>& stopwords,
                                         const RankOptions& options) {
    if (query.tokens.empty()) {
        raise(Errc::empty_bag, "query bag is empty");
    }
    struct Candidate {
        std::size_t index;
        DocumentBag bag;
        double bound;
    };
    // Bags and lower bounds per candidate; entries are independent so this
    // is the data-parallel part.
    std::vector<std::optional<Candidate>> prepared(candidates.size());
    for_each_index(candidates.size(), options.policy, [&](std::size_t idx) {
        try {
            Candidate c;
            c.index = idx;
            c.bag = to_nbow(candidates[idx].title + " " + candidates[idx].description, table, stopwords);
            c.bound = rwmd_lower_bound(query, c.bag, table);
            prepared[idx] = std::move(c);
        } catch (const Error& e) {
            if (e.code() != Errc::empty_bag) {
                throw;
            }
        }
    });

    std::vector<Candidate> usable;
    for (auto& c : prepared) {
        if (c) {
            usable.push_back(std::move(*c));
        }
    }
    if (usable.empty()) {
        raise(Errc::no_rankable_candidates, "every candidate was out of vocabulary");
    }
    // visit in bound order so the cutoff tightens early
    std::sort(usable.begin(), usable.end(), [&](const Candidate& a, const Candidate& b) {
        if (a.bound != b.bound) {
            return a.bound < b.bound;
        }
        return candidates[a.index].id < candidates[b.index].id;
    });

    // Exact solves proceed in bound order so the cutoff tightens early.
    // Under the parallel policy candidates are solved in chunks; a chunk may
    // solve entries a serial pass would have pruned mid-chunk, but any such
    // candidate has wmd >= bound > cutoff and can never reach the final
    // list, so both policies return identical rankings.
    const std::size_t chunk_size =
        options.policy == ExecPolicy::parallel ? std::max(4, 2 * max_threads()) : 1;
    std::vector<RankedDataset> results;
    std::size_t next = 0;
    while (next < usable.size()) {
        double cutoff = std::numeric_limits<double>::infinity();
        if (options.prune && results.size() >= options.top_n) {
            // current top_n-th best distance; a bound strictly above it can
            // never enter the list, not even on a tie
            std::vector<double> distances;
            distances.reserve(results.size());
            for (const auto& r : results) {
                distances.push_back(r.distance);
            }
            std::nth_element(distances.begin(), distances.begin() + (options.top_n - 1), distances.end());
            cutoff = distances[options.top_n - 1];
        }
        std::vector<std::size_t> chunk;
        while (next < usable.size() && chunk.size() < chunk_size) {
            if (usable[next].bound > cutoff) {
                ++next;
                continue;
            }
            chunk.push_back(next++);
        }
        std::vector<double> distances(chunk.size());
        for_each_index(chunk.size(), options.policy, [&](std::size_t k) {
            distances[k] = wmd(query, usable[chunk[k]].bag, table);
        });
        for (std::size_t k = 0; k < chunk.size(); ++k) {
            results.push_back({candidates[usable[chunk[k]].index].id, distances[k]});
        }
    }
    std::sort(results.begin(), results.end(), [](const RankedDataset& a, const RankedDataset& b) {
        if (a.distance != b.distance) {
            return a.distance < b.distance;
        }
        return a.id < b.id;
    });
    if (results.size() > options.top_n) {
        results.resize(options.top_n);
    }
    return results;
}

std::vector<std::size_t> diversity_sample_indices(std::size_t n_ranked, std::size_t pool_size,
                                                  std::size_t k, std::uint64_t seed) {
    if (k < 1) {
        raise(Errc::config_error, "k must be at least 1");
    }
    if (n_ranked == 0) {
        raise(Errc::empty_input, "nothing to sample from");
    }
    const std::size_t pool = std::min(pool_size, n_ranked);
    std::vector<std::size_t> indices(pool);
    std::iota(indices.begin(), indices.end(), 0);
    if (pool <= k) {
        return indices;
    }
    // partial Fisher-Yates: the first k slots become a uniform k-subset
    Rng rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(pool - i));
        std::swap(indices[i], indices[j]);
    }
    indices.resize(k);
    std::sort(indices.begin(), indices.end()); // preserve rank order
    return indices;
}

} // namespace xdf::recommend
