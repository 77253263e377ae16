#pragma once

#include "xdf/kg/graph.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace xdf::kg {

/// One flat source record, e.g. a demand row or an event fixture entry.
/// `source` names the record stream a rule can select on.
struct FlatRecord {
    std::string source;
    std::map<std::string, std::string> fields;
};

/// Binds one node property either to a record field or to a constant.
struct PropertyBinding {
    std::string property;
    std::string field;       // record field name when not constant
    std::string const_value; // used when is_const
    bool is_const = false;
    bool numeric = false; // parse the bound value into a JSON number
};

/// Declares one edge to materialize alongside the rule's node. The opposite
/// endpoint is located by natural key, built from `other_key` bindings.
struct EdgeTemplate {
    Relation relation;
    bool node_is_src = true;
    ConceptLabel other_label;
    std::vector<PropertyBinding> other_key;
};

/// Declarative virtual-mapping rule: for every record of `source` matching
/// `selector`, instantiate one node (deduplicated by natural key) plus the
/// listed edges.
struct MappingRule {
    std::string name;
    std::string source;
    std::map<std::string, std::string> selector; // field equality, all must hold
    ConceptLabel label;
    std::vector<PropertyBinding> properties;
    std::string event_time_field; // optional; value is YYYY-MM or YYYY-MM-DD
    std::vector<EdgeTemplate> edges;
};

std::vector<MappingRule> parse_mapping_rules(const nlohmann::json& document);
std::vector<MappingRule> load_mapping_rules(const std::filesystem::path& path);

/// Structural validation against the ontology schema: labels and relations
/// must exist, bound properties must be declared for the label, and every
/// natural-key property must be bound. Throws SchemaViolation.
void validate_rules(std::span<const MappingRule> rules);

/// Applies the rules to the records. Deterministic and idempotent: node
/// identity is (label, natural key), edges are exact-match deduplicated, so
/// re-applying the same input creates nothing. A record that cannot be fully
/// materialized under a matching rule (missing bound field, unparsable
/// number or unresolvable edge endpoint) is skipped and counted once.
IngestionSummary apply_mapping(KnowledgeGraph& graph, std::span<const FlatRecord> records,
                               std::span<const MappingRule> rules);

} // namespace xdf::kg
