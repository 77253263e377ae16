#pragma once

#include "xdf/recommend/wmd.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

namespace xdf::recommend {

struct DatasetMetadata {
    std::string id;
    std::string title;
    std::string description;
    std::string publisher;
    std::string uri;
};

std::vector<DatasetMetadata> load_dataset_fixture(const std::filesystem::path& path);

/// Client contract for external dataset portals: adapters for real services
/// implement this; the bundled backend serves a fixture file.
class DatasetBackend {
public:
    virtual ~DatasetBackend() = default;

    /// Metadata entries matching at least one keyword, at most `limit`,
    /// sorted by id.
    virtual std::vector<DatasetMetadata> query(std::span<const std::string> keywords,
                                               std::size_t limit) const = 0;
};

/// Fixture portal. Multi-word keywords match as whole phrases on the
/// lowercased title+description; single-word keywords match any token of it
/// after noun lemmatization (a stand-in for portal-side stemming).
class FixtureDatasetBackend : public DatasetBackend {
public:
    explicit FixtureDatasetBackend(std::vector<DatasetMetadata> entries);
    static FixtureDatasetBackend from_jsonl(const std::filesystem::path& path);

    std::vector<DatasetMetadata> query(std::span<const std::string> keywords,
                                       std::size_t limit) const override;

    const std::vector<DatasetMetadata>& entries() const { return entries_; }

private:
    std::vector<DatasetMetadata> entries_; // id-sorted
    std::vector<std::string> raw_texts_;   // lowercased title+description
    std::vector<std::unordered_set<std::string>> lemma_sets_;
};

struct RankedDataset {
    std::string id;
    double distance = 0.0;
};

struct RankOptions {
    std::size_t top_n = 10;
    bool prune = true; // skip exact solves the RWMD bound rules out
    ExecPolicy policy = ExecPolicy::serial;
};

/**
 * Ranks candidates by WMD between the query bag and each candidate's
 * title+description bag, ascending, ties by id, at most top_n results.
 * Candidates whose text yields an empty bag are skipped. With pruning on,
 * candidates are visited in RWMD order and the exact solve is skipped
 * whenever the bound already exceeds the current cutoff; a candidate is
 * only skipped when the bound is strictly above the cutoff, so the pruned
 * and unpruned rankings are identical. Throws NoRankableCandidates when
 * nothing survives.
 */
std::vector<RankedDataset> rank_datasets(const DocumentBag& query,
                                         std::span<const DatasetMetadata> candidates,
                                         const EmbeddingTable& table,
                                         const std::unordered_set<std::string>& stopwords,
                                         const RankOptions& options);

/// Uniform sample without replacement of k items from the first
/// min(pool_size, n_ranked) entries, output in rank order, deterministic
/// given the seed. The whole pool is returned when it has at most k items.
/// Throws EmptyInput.
std::vector<std::size_t> diversity_sample_indices(std::size_t n_ranked, std::size_t pool_size,
                                                  std::size_t k, std::uint64_t seed);

template <typename T>
std::vector<T> diversity_sample(const std::vector<T>& ranked, std::size_t pool_size, std::size_t k,
                                std::uint64_t seed) {
    std::vector<T> out;
    for (std::size_t index : diversity_sample_indices(ranked.size(), pool_size, k, seed)) {
        out.push_back(ranked[index]);
    }
    return out;
}

} // namespace xdf::recommend
