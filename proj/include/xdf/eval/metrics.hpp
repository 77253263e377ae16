#pragma once

#include "json.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace xdf::eval {

enum class ItemKind { event, keyword, dataset };

const char* to_string(ItemKind kind);
ItemKind parse_item_kind(const std::string& name);

struct AnnotationRecord {
    std::string explanation_id;
    ItemKind kind = ItemKind::event;
    int rank = 1; // 1-based list position
    std::string item_id;
    bool relevant = false;
};

/// Columns explanation_id,item_kind,rank,item_id,relevant. Enforces rank
/// bounds (<= 3 for events/keywords, = 1 for datasets) and uniqueness of
/// (explanation_id, kind, rank). Throws MalformedAnnotationFile with the
/// offending line number.
std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path);

/// Fraction of relevant items among the first min(k, |items|); the caller
/// excludes empty lists from averages.
double precision_at_k(const std::vector<bool>& items, std::size_t k);

/// Mean of per-explanation precision@k for the kind. Throws NoAnnotations
/// when no explanation lists items of the kind.
double average_precision_at_k(std::span<const AnnotationRecord> annotations, ItemKind kind,
                              std::size_t k);

/// Unique entries / total listed entries. Throws EmptyEntries.
double rde(std::span<const std::string> entries);

/// RDE over the concatenation of every explanation's first k item ids of the
/// kind.
double rde_at_k(std::span<const AnnotationRecord> annotations, ItemKind kind, std::size_t k);

struct KindMetrics {
    double average_precision_at_1 = 0.0;
    double average_precision_at_3 = 0.0;
    double rde_at_1 = 0.0;
    double rde_at_3 = 0.0;
};

struct MetricsReport {
    KindMetrics events;
    KindMetrics keywords;
    double dataset_accuracy = 0.0; // mean relevant flag over all dataset rows
    double dataset_rde = 0.0;      // over all listed dataset ids
    std::size_t explanation_count = 0;
    std::size_t annotation_count = 0;
};

MetricsReport report(std::span<const AnnotationRecord> annotations);

nlohmann::json to_json(const MetricsReport& report);
std::string render_table(const MetricsReport& report);

} // namespace xdf::eval
