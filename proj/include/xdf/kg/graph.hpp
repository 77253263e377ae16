#pragma once

#include "xdf/core/error.hpp"
#include "xdf/core/time.hpp"

#include "json.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

namespace xdf::kg {

/// Ontology concepts. Closed set: every node carries exactly one label.
enum class ConceptLabel {
    Product,
    Event,
    MediaReportedEvent,
    MediaReportedEventKeyword,
    ExternalDatasetMetadata,
    ForecastExplanation,
    Attribute,
    AttributeAbstraction,
    FeatureVector,
    DatasetSpecification,
    Dataset,
    Algorithm,
    RegressionModel,
    Prediction,
    InformationProvenance,
};

enum class Relation {
    hasAttribute,
    abstractedBy,
    parentConcept,
    explains,
    evidencedBy,
    hasKeyword,
    recommendsDataset,
    predictedBy,
    describedBy,
    fromProvenance,
};

const char* to_string(ConceptLabel label);
const char* to_string(Relation relation);
ConceptLabel parse_concept_label(const std::string& name); // throws UnknownLabel
Relation parse_relation(const std::string& name);          // throws UnknownRelation

/// Per-label property contract: required properties must be present on every
/// node, the natural key identifies a node for deduplication, and bindings
/// outside required+optional are schema violations.
struct LabelSchema {
    std::vector<std::string> required;
    std::vector<std::string> optional;
    std::vector<std::string> natural_key;
};

const LabelSchema& label_schema(ConceptLabel label);

/// True when (relation, src label, dst label) is in the fixed relation table.
bool relation_allowed(Relation relation, ConceptLabel src, ConceptLabel dst);

/// Canonical node id derived from the label and its natural-key properties,
/// e.g. Prediction keyed on (material, month) -> "Prediction:M1:2020-06".
std::string node_id_for(ConceptLabel label, const nlohmann::json& properties);

struct KGNode {
    std::string id;
    ConceptLabel label;
    nlohmann::json properties; // object; values are strings or numbers
    std::optional<Date> event_time;
};

struct KGEdge {
    std::string src;
    std::string dst;
    Relation relation;

    auto operator<=>(const KGEdge&) const = default;
};

/// One hop of a pattern: follow `relation` forward (src -> dst) or backward,
/// landing on a node with the given label whose properties match `filters`.
struct PatternStep {
    Relation relation;
    bool forward = true;
    ConceptLabel label;
    nlohmann::json filters = nlohmann::json::object();
};

struct Pattern {
    ConceptLabel label;
    nlohmann::json filters = nlohmann::json::object();
    std::vector<PatternStep> steps;
};

struct IngestionSummary {
    std::size_t nodes_created = 0;
    std::size_t edges_created = 0;
    std::size_t records_skipped = 0;
};

/**
 * In-memory typed property graph. Single writer, multiple readers: mutating
 * calls take the exclusive lock, queries the shared one. Node identity is
 * (label, natural key); edges are deduplicated exactly.
 */
class KnowledgeGraph {
public:
    KnowledgeGraph() = default;
    KnowledgeGraph(const KnowledgeGraph& other);
    KnowledgeGraph& operator=(const KnowledgeGraph& other);

    /// Creates the node if its natural key is new; otherwise returns the
    /// existing id untouched. Throws SchemaViolation when required
    /// properties are missing or a property is undeclared for the label.
    std::pair<std::string, bool> upsert_node(ConceptLabel label, nlohmann::json properties,
                                             std::optional<Date> event_time = std::nullopt);

    /// Returns false when the identical edge already exists. Throws
    /// DanglingEdge when an endpoint is missing and SchemaViolation when the
    /// endpoint labels are not allowed for the relation.
    bool add_edge(const std::string& src, const std::string& dst, Relation relation);

    /// Removes every node with event_time < now - window_days along with its
    /// incident edges; nodes without event_time are retained. Returns the
    /// number of nodes removed.
    std::size_t prune_window(Date now, int window_days);

    const KGNode* find(const std::string& id) const;
    std::vector<std::string> ids_with_label(ConceptLabel label) const; // sorted

    /// All bindings of the pattern, one row per match with one node id per
    /// pattern element, sorted lexicographically by the id tuple.
    std::vector<std::vector<std::string>> query_pattern(const Pattern& pattern) const;

    /// Concept names from the feature's direct abstraction upward through
    /// parentConcept edges, at most `levels` entries. Throws UnknownAttribute
    /// when the feature has no abstractedBy edge and CycleDetected when the
    /// configured hierarchy loops.
    std::vector<std::string> abstraction_chain(const std::string& feature_id, int levels) const;

    std::size_t node_count() const;
    std::size_t edge_count() const;

    /// Re-checks every structural invariant (labels, relation table, edge
    /// endpoints, required properties). Throws on the first violation.
    void check_invariants() const;

    /// Line-delimited export: one JSON object per node or edge.
    void export_jsonl(std::ostream& out) const;
    void import_jsonl(std::istream& in); // merges into the current graph

private:
    bool edge_exists_unlocked(const KGEdge& edge) const;
    bool node_matches(const KGNode& node, const nlohmann::json& filters) const;

    std::map<std::string, KGNode> nodes_;
    std::set<KGEdge> edges_;
    std::map<std::string, std::vector<KGEdge>> out_edges_;
    std::map<std::string, std::vector<KGEdge>> in_edges_;
    mutable std::shared_mutex mutex_;
};

} // namespace xdf::kg
