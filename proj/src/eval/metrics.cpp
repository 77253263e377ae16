#include "xdf/eval/metrics.hpp"

#include "xdf/core/delimited.hpp"
#include "xdf/core/error.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace xdf::eval {

namespace {

/// (explanation -> rank-ordered records) for one kind, explanation ids in
/// lexicographic order.
std::map<std::string, std::vector<AnnotationRecord>> group_by_explanation(
    std::span<const AnnotationRecord> annotations, ItemKind kind) {
    std::map<std::string, std::vector<AnnotationRecord>> groups;
    for (const auto& record : annotations) {
        if (record.kind == kind) {
            groups[record.explanation_id].push_back(record);
        }
    }
    for (auto& [id, records] : groups) {
        std::sort(records.begin(), records.end(),
                  [](const AnnotationRecord& a, const AnnotationRecord& b) { return a.rank < b.rank; });
    }
    return groups;
}

} // namespace

const char* to_string(ItemKind kind) {
    switch (kind) {
        case ItemKind::event: return "event";
        case ItemKind::keyword: return "keyword";
        case ItemKind::dataset: return "dataset";
    }
    return "?";
}

ItemKind parse_item_kind(const std::string& name) {
    for (auto kind : {ItemKind::event, ItemKind::keyword, ItemKind::dataset}) {
        if (name == to_string(kind)) {
            return kind;
        }
    }
    raise(Errc::malformed_annotation_file, "unknown item kind '" + name + "'");
}

std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path) {
    DelimitedTable table;
    try {
        table = read_delimited(path);
    } catch (const Error& e) {
        raise(Errc::malformed_annotation_file, e.what());
    }
    const auto exp_col = table.column_index("explanation_id");
    const auto kind_col = table.column_index("item_kind");
    const auto rank_col = table.column_index("rank");
    const auto item_col = table.column_index("item_id");
    const auto rel_col = table.column_index("relevant");

    std::vector<AnnotationRecord> records;
    std::set<std::tuple<std::string, ItemKind, int>> seen;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::string at_line = path.string() + ":" + std::to_string(table.line_numbers[i]);
        AnnotationRecord record;
        record.explanation_id = row[exp_col];
        record.kind = parse_item_kind(row[kind_col]);
        const auto& rank_text = row[rank_col];
        auto [ptr, ec] = std::from_chars(rank_text.data(), rank_text.data() + rank_text.size(), record.rank);
        if (ec != std::errc{} || ptr != rank_text.data() + rank_text.size() || record.rank < 1) {
            raise(Errc::malformed_annotation_file, at_line + ": bad rank '" + rank_text + "'");
        }
        const int rank_limit = record.kind == ItemKind::dataset ? 1 : 3;
        if (record.rank > rank_limit) {
            raise(Errc::malformed_annotation_file,
                  at_line + ": rank " + rank_text + " exceeds limit for " + to_string(record.kind));
        }
        record.item_id = row[item_col];
        if (row[rel_col] == "1") {
            record.relevant = true;
        } else if (row[rel_col] == "0") {
            record.relevant = false;
        } else {
            raise(Errc::malformed_annotation_file, at_line + ": relevant must be 0 or 1");
        }
        if (!seen.insert({record.explanation_id, record.kind, record.rank}).second) {
            raise(Errc::malformed_annotation_file,
                  at_line + ": duplicate (explanation, kind, rank) entry");
        }
        records.push_back(std::move(record));
    }
    return records;
}

double precision_at_k(const std::vector<bool>& items, std::size_t k) {
    if (k < 1) {
        raise(Errc::config_error, "k must be at least 1");
    }
    const std::size_t considered = std::min(k, items.size());
    if (considered == 0) {
        raise(Errc::no_annotations, "precision of an empty list is undefined");
    }
    std::size_t relevant = 0;
    for (std::size_t i = 0; i < considered; ++i) {
        relevant += items[i] ? 1 : 0;
    }
    return static_cast<double>(relevant) / static_cast<double>(considered);
}

double average_precision_at_k(std::span<const AnnotationRecord> annotations, ItemKind kind,
                              std::size_t k) {
    const auto groups = group_by_explanation(annotations, kind);
    if (groups.empty()) {
        raise(Errc::no_annotations, std::string("no ") + to_string(kind) + " annotations");
    }
    double total = 0.0;
    for (const auto& [id, records] : groups) {
        std::vector<bool> flags;
        flags.reserve(records.size());
        for (const auto& record : records) {
            flags.push_back(record.relevant);
        }
        total += precision_at_k(flags, k);
    }
    return total / static_cast<double>(groups.size());
}

double rde(std::span<const std::string> entries) {
    if (entries.empty()) {
        raise(Errc::empty_entries, "RDE of an empty list is undefined");
    }
    std::set<std::string> unique(entries.begin(), entries.end());
    return static_cast<double>(unique.size()) / static_cast<double>(entries.size());
}

double rde_at_k(std::span<const AnnotationRecord> annotations, ItemKind kind, std::size_t k) {
    const auto groups = group_by_explanation(annotations, kind);
    if (groups.empty()) {
        raise(Errc::no_annotations, std::string("no ") + to_string(kind) + " annotations");
    }
    std::vector<std::string> concatenated;
    for (const auto& [id, records] : groups) {
        for (std::size_t i = 0; i < records.size() && i < k; ++i) {
            concatenated.push_back(records[i].item_id);
        }
    }
    return rde(concatenated);
}

MetricsReport report(std::span<const AnnotationRecord> annotations) {
    if (annotations.empty()) {
        raise(Errc::no_annotations, "annotation set is empty");
    }
    MetricsReport out;
    out.annotation_count = annotations.size();
    std::set<std::string> explanations;
    for (const auto& record : annotations) {
        explanations.insert(record.explanation_id);
    }
    out.explanation_count = explanations.size();

    out.events.average_precision_at_1 = average_precision_at_k(annotations, ItemKind::event, 1);
    out.events.average_precision_at_3 = average_precision_at_k(annotations, ItemKind::event, 3);
    out.events.rde_at_1 = rde_at_k(annotations, ItemKind::event, 1);
    out.events.rde_at_3 = rde_at_k(annotations, ItemKind::event, 3);

    out.keywords.average_precision_at_1 = average_precision_at_k(annotations, ItemKind::keyword, 1);
    out.keywords.average_precision_at_3 = average_precision_at_k(annotations, ItemKind::keyword, 3);
    out.keywords.rde_at_1 = rde_at_k(annotations, ItemKind::keyword, 1);
    out.keywords.rde_at_3 = rde_at_k(annotations, ItemKind::keyword, 3);

    std::size_t dataset_rows = 0;
    std::size_t dataset_relevant = 0;
    std::vector<std::string> dataset_ids;
    for (const auto& record : annotations) {
        if (record.kind == ItemKind::dataset) {
            ++dataset_rows;
            dataset_relevant += record.relevant ? 1 : 0;
            dataset_ids.push_back(record.item_id);
        }
    }
    if (dataset_rows == 0) {
        raise(Errc::no_annotations, "no dataset annotations");
    }
    out.dataset_accuracy = static_cast<double>(dataset_relevant) / static_cast<double>(dataset_rows);
    out.dataset_rde = rde(dataset_ids);
    return out;
}

nlohmann::json to_json(const MetricsReport& report) {
    return nlohmann::json{
        {"events",
         {{"average_precision_at_1", report.events.average_precision_at_1},
          {"average_precision_at_3", report.events.average_precision_at_3},
          {"rde_at_1", report.events.rde_at_1},
          {"rde_at_3", report.events.rde_at_3}}},
        {"keywords",
         {{"average_precision_at_1", report.keywords.average_precision_at_1},
          {"average_precision_at_3", report.keywords.average_precision_at_3},
          {"rde_at_1", report.keywords.rde_at_1},
          {"rde_at_3", report.keywords.rde_at_3}}},
        {"datasets", {{"accuracy", report.dataset_accuracy}, {"rde", report.dataset_rde}}},
        {"explanation_count", report.explanation_count},
        {"annotation_count", report.annotation_count},
    };
}

std::string render_table(const MetricsReport& report) {
    std::ostringstream out;
    auto row = [&](const char* group, const char* metric, double value) {
        char line[96];
        std::snprintf(line, sizeof(line), "%-24s %-22s %.2f\n", group, metric, value);
        out << line;
    };
    out << "group                    metric                 value\n";
    row("Media Events", "average precision@1", report.events.average_precision_at_1);
    row("Media Events", "average precision@3", report.events.average_precision_at_3);
    row("Media Events", "RDE@1", report.events.rde_at_1);
    row("Media Events", "RDE@3", report.events.rde_at_3);
    row("Media Events' Keywords", "average precision@1", report.keywords.average_precision_at_1);
    row("Media Events' Keywords", "average precision@3", report.keywords.average_precision_at_3);
    row("Media Events' Keywords", "RDE@1", report.keywords.rde_at_1);
    row("Media Events' Keywords", "RDE@3", report.keywords.rde_at_3);
    row("External Datasets", "accuracy", report.dataset_accuracy);
    row("External Datasets", "RDE", report.dataset_rde);
    return out.str();
}

} // namespace xdf::eval
