#include "xdf/kg/graph.hpp"

#include <algorithm>
#include <mutex>
#include <istream>
#include <ostream>
#include <unordered_set>

namespace xdf::kg {

namespace {

struct LabelInfo {
    ConceptLabel label;
    const char* name;
    LabelSchema schema;
};

const std::vector<LabelInfo>& label_table() {
    static const std::vector<LabelInfo> table = {
        {ConceptLabel::Product, "Product", {{"material"}, {"description"}, {"material"}}},
        {ConceptLabel::Event, "Event", {{"name"}, {"description"}, {"name"}}},
        {ConceptLabel::MediaReportedEvent,
         "MediaReportedEvent",
         {{"event_id", "date", "title"}, {"body", "source"}, {"event_id"}}},
        {ConceptLabel::MediaReportedEventKeyword, "MediaReportedEventKeyword", {{"lemma"}, {}, {"lemma"}}},
        {ConceptLabel::ExternalDatasetMetadata,
         "ExternalDatasetMetadata",
         {{"dataset_id", "title"}, {"description", "publisher", "uri"}, {"dataset_id"}}},
        {ConceptLabel::ForecastExplanation,
         "ForecastExplanation",
         {{"explanation_id"}, {"material", "month"}, {"explanation_id"}}},
        {ConceptLabel::Attribute, "Attribute", {{"feature_id"}, {"actionable"}, {"feature_id"}}},
        {ConceptLabel::AttributeAbstraction, "AttributeAbstraction", {{"name"}, {"long_name"}, {"name"}}},
        {ConceptLabel::FeatureVector, "FeatureVector", {{"material", "month"}, {}, {"material", "month"}}},
        {ConceptLabel::DatasetSpecification, "DatasetSpecification", {{"name"}, {"description"}, {"name"}}},
        {ConceptLabel::Dataset, "Dataset", {{"name"}, {"description"}, {"name"}}},
        {ConceptLabel::Algorithm, "Algorithm", {{"name"}, {"description"}, {"name"}}},
        {ConceptLabel::RegressionModel,
         "RegressionModel",
         {{"name"}, {"algorithm", "hyperparameters"}, {"name"}}},
        {ConceptLabel::Prediction,
         "Prediction",
         {{"material", "month", "value", "lower", "upper"}, {}, {"material", "month"}}},
        {ConceptLabel::InformationProvenance, "InformationProvenance", {{"source_name"}, {}, {"source_name"}}},
    };
    return table;
}

struct RelationInfo {
    Relation relation;
    const char* name;
    std::vector<std::pair<ConceptLabel, ConceptLabel>> endpoints;
};

const std::vector<RelationInfo>& relation_table() {
    using CL = ConceptLabel;
    static const std::vector<RelationInfo> table = {
        {Relation::hasAttribute, "hasAttribute", {{CL::FeatureVector, CL::Attribute}}},
        {Relation::abstractedBy, "abstractedBy", {{CL::Attribute, CL::AttributeAbstraction}}},
        {Relation::parentConcept, "parentConcept", {{CL::AttributeAbstraction, CL::AttributeAbstraction}}},
        {Relation::explains, "explains", {{CL::ForecastExplanation, CL::Prediction}}},
        {Relation::evidencedBy, "evidencedBy", {{CL::ForecastExplanation, CL::MediaReportedEvent}}},
        {Relation::hasKeyword,
         "hasKeyword",
         {{CL::ForecastExplanation, CL::MediaReportedEventKeyword},
          {CL::MediaReportedEvent, CL::MediaReportedEventKeyword}}},
        {Relation::recommendsDataset, "recommendsDataset", {{CL::ForecastExplanation, CL::ExternalDatasetMetadata}}},
        {Relation::predictedBy, "predictedBy", {{CL::Prediction, CL::RegressionModel}}},
        {Relation::describedBy,
         "describedBy",
         {{CL::Product, CL::FeatureVector},
          {CL::Prediction, CL::FeatureVector},
          {CL::Dataset, CL::DatasetSpecification}}},
        {Relation::fromProvenance,
         "fromProvenance",
         {{CL::MediaReportedEvent, CL::InformationProvenance},
          {CL::ExternalDatasetMetadata, CL::InformationProvenance}}},
    };
    return table;
}

const LabelInfo& label_info(ConceptLabel label) {
    for (const auto& info : label_table()) {
        if (info.label == label) {
            return info;
        }
    }
    raise(Errc::unknown_label, "label enum out of range");
}

const RelationInfo& relation_info(Relation relation) {
    for (const auto& info : relation_table()) {
        if (info.relation == relation) {
            return info;
        }
    }
    raise(Errc::unknown_relation, "relation enum out of range");
}

std::string property_as_string(const nlohmann::json& value) {
    if (value.is_string()) {
        return value.get<std::string>();
    }
    return value.dump();
}

} // namespace

const char* to_string(ConceptLabel label) {
    return label_info(label).name;
}

const char* to_string(Relation relation) {
    return relation_info(relation).name;
}

ConceptLabel parse_concept_label(const std::string& name) {
    for (const auto& info : label_table()) {
        if (name == info.name) {
            return info.label;
        }
    }
    raise(Errc::unknown_label, "'" + name + "' is not an ontology concept");
}

Relation parse_relation(const std::string& name) {
    for (const auto& info : relation_table()) {
        if (name == info.name) {
            return info.relation;
        }
    }
    raise(Errc::unknown_relation, "'" + name + "' is not an ontology relation");
}

const LabelSchema& label_schema(ConceptLabel label) {
    return label_info(label).schema;
}

bool relation_allowed(Relation relation, ConceptLabel src, ConceptLabel dst) {
    for (const auto& [s, d] : relation_info(relation).endpoints) {
        if (s == src && d == dst) {
            return true;
        }
    }
    return false;
}

std::string node_id_for(ConceptLabel label, const nlohmann::json& properties) {
    const auto& schema = label_schema(label);
    std::string id = to_string(label);
    for (const auto& key : schema.natural_key) {
        auto it = properties.find(key);
        if (it == properties.end()) {
            raise(Errc::schema_violation,
                  std::string(to_string(label)) + " natural key property '" + key + "' missing");
        }
        id += ':';
        id += property_as_string(*it);
    }
    return id;
}

KnowledgeGraph::KnowledgeGraph(const KnowledgeGraph& other) {
    std::shared_lock lock(other.mutex_);
    nodes_ = other.nodes_;
    edges_ = other.edges_;
    out_edges_ = other.out_edges_;
    in_edges_ = other.in_edges_;
}

KnowledgeGraph& KnowledgeGraph::operator=(const KnowledgeGraph& other) {
    if (this != &other) {
        std::shared_lock read(other.mutex_);
        std::unique_lock write(mutex_);
        nodes_ = other.nodes_;
        edges_ = other.edges_;
        out_edges_ = other.out_edges_;
        in_edges_ = other.in_edges_;
    }
    return *this;
}

std::pair<std::string, bool> KnowledgeGraph::upsert_node(ConceptLabel label, nlohmann::json properties,
                                                         std::optional<Date> event_time) {
    const auto& schema = label_schema(label);
    for (const auto& key : schema.required) {
        if (!properties.contains(key)) {
            raise(Errc::schema_violation,
                  std::string(to_string(label)) + " requires property '" + key + "'");
        }
    }
    for (const auto& [key, value] : properties.items()) {
        (void)value;
        const bool declared =
            std::find(schema.required.begin(), schema.required.end(), key) != schema.required.end() ||
            std::find(schema.optional.begin(), schema.optional.end(), key) != schema.optional.end();
        if (!declared) {
            raise(Errc::schema_violation,
                  std::string(to_string(label)) + " does not declare property '" + key + "'");
        }
    }
    std::string id = node_id_for(label, properties);

    std::unique_lock lock(mutex_);
    auto it = nodes_.find(id);
    if (it != nodes_.end()) {
        return {id, false};
    }
    nodes_.emplace(id, KGNode{id, label, std::move(properties), event_time});
    return {id, true};
}

bool KnowledgeGraph::add_edge(const std::string& src, const std::string& dst, Relation relation) {
    std::unique_lock lock(mutex_);
    auto src_it = nodes_.find(src);
    auto dst_it = nodes_.find(dst);
    if (src_it == nodes_.end() || dst_it == nodes_.end()) {
        raise(Errc::dangling_edge, std::string(to_string(relation)) + " edge endpoint missing: " +
                                       (src_it == nodes_.end() ? src : dst));
    }
    if (!relation_allowed(relation, src_it->second.label, dst_it->second.label)) {
        raise(Errc::schema_violation, std::string(to_string(relation)) + " not allowed from " +
                                          to_string(src_it->second.label) + " to " +
                                          to_string(dst_it->second.label));
    }
    KGEdge edge{src, dst, relation};
    if (!edges_.insert(edge).second) {
        return false;
    }
    out_edges_[src].push_back(edge);
    in_edges_[dst].push_back(edge);
    std::sort(out_edges_[src].begin(), out_edges_[src].end());
    std::sort(in_edges_[dst].begin(), in_edges_[dst].end());
    return true;
}

std::size_t KnowledgeGraph::prune_window(Date now, int window_days) {
    if (window_days <= 0) {
        raise(Errc::config_error, "prune window must be positive");
    }
    const Date cutoff = now.plus_days(-window_days);
    std::unique_lock lock(mutex_);
    std::vector<std::string> stale;
    for (const auto& [id, node] : nodes_) {
        if (node.event_time && *node.event_time < cutoff) {
            stale.push_back(id);
        }
    }
    for (const auto& id : stale) {
        for (auto it = edges_.begin(); it != edges_.end();) {
            if (it->src == id || it->dst == id) {
                it = edges_.erase(it);
            } else {
                ++it;
            }
        }
        out_edges_.erase(id);
        in_edges_.erase(id);
        nodes_.erase(id);
    }
    // Adjacency lists may still reference removed endpoints; rebuild them.
    if (!stale.empty()) {
        out_edges_.clear();
        in_edges_.clear();
        for (const auto& edge : edges_) {
            out_edges_[edge.src].push_back(edge);
            in_edges_[edge.dst].push_back(edge);
        }
    }
    return stale.size();
}

const KGNode* KnowledgeGraph::find(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = nodes_.find(id);
    return it == nodes_.end() ? nullptr : &it->second;
}

std::vector<std::string> KnowledgeGraph::ids_with_label(ConceptLabel label) const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> ids;
    for (const auto& [id, node] : nodes_) {
        if (node.label == label) {
            ids.push_back(id);
        }
    }
    return ids; // nodes_ is an ordered map, so already sorted
}

bool KnowledgeGraph::node_matches(const KGNode& node, const nlohmann::json& filters) const {
    for (const auto& [key, expected] : filters.items()) {
        auto it = node.properties.find(key);
        if (it == node.properties.end() || *it != expected) {
            return false;
        }
    }
    return true;
}

std::vector<std::vector<std::string>> KnowledgeGraph::query_pattern(const Pattern& pattern) const {
    std::shared_lock lock(mutex_);
    std::vector<std::vector<std::string>> rows;
    for (const auto& [id, node] : nodes_) {
        if (node.label != pattern.label || !node_matches(node, pattern.filters)) {
            continue;
        }
        std::vector<std::vector<std::string>> partial = {{id}};
        for (const auto& step : pattern.steps) {
            std::vector<std::vector<std::string>> next;
            for (const auto& row : partial) {
                const std::string& from = row.back();
                const auto& adjacency = step.forward ? out_edges_ : in_edges_;
                auto adj_it = adjacency.find(from);
                if (adj_it == adjacency.end()) {
                    continue;
                }
                for (const auto& edge : adj_it->second) {
                    if (edge.relation != step.relation) {
                        continue;
                    }
                    const std::string& to = step.forward ? edge.dst : edge.src;
                    auto node_it = nodes_.find(to);
                    if (node_it == nodes_.end() || node_it->second.label != step.label ||
                        !node_matches(node_it->second, step.filters)) {
                        continue;
                    }
                    auto extended = row;
                    extended.push_back(to);
                    next.push_back(std::move(extended));
                }
            }
            partial = std::move(next);
        }
        for (auto& row : partial) {
            rows.push_back(std::move(row));
        }
    }
    std::sort(rows.begin(), rows.end());
    return rows;
}

std::vector<std::string> KnowledgeGraph::abstraction_chain(const std::string& feature_id, int levels) const {
    if (levels < 1) {
        raise(Errc::config_error, "levels must be positive");
    }
    std::shared_lock lock(mutex_);
    nlohmann::json key{{"feature_id", feature_id}};
    const std::string attr_id = node_id_for(ConceptLabel::Attribute, key);
    auto attr_it = nodes_.find(attr_id);
    if (attr_it == nodes_.end()) {
        raise(Errc::unknown_attribute, "no Attribute node for feature '" + feature_id + "'");
    }
    auto find_single_target = [&](const std::string& from, Relation rel) -> const KGNode* {
        auto adj_it = out_edges_.find(from);
        if (adj_it == out_edges_.end()) {
            return nullptr;
        }
        for (const auto& edge : adj_it->second) {
            if (edge.relation == rel) {
                return &nodes_.at(edge.dst);
            }
        }
        return nullptr;
    };
    const KGNode* current = find_single_target(attr_id, Relation::abstractedBy);
    if (current == nullptr) {
        raise(Errc::unknown_attribute, "feature '" + feature_id + "' has no abstractedBy edge");
    }
    std::vector<std::string> chain;
    std::unordered_set<std::string> visited;
    while (current != nullptr && static_cast<int>(chain.size()) < levels) {
        if (!visited.insert(current->id).second) {
            raise(Errc::cycle_detected, "abstraction hierarchy loops at " + current->id);
        }
        chain.push_back(current->properties.at("name").get<std::string>());
        current = find_single_target(current->id, Relation::parentConcept);
    }
    return chain;
}

std::size_t KnowledgeGraph::node_count() const {
    std::shared_lock lock(mutex_);
    return nodes_.size();
}

std::size_t KnowledgeGraph::edge_count() const {
    std::shared_lock lock(mutex_);
    return edges_.size();
}

bool KnowledgeGraph::edge_exists_unlocked(const KGEdge& edge) const {
    return edges_.count(edge) > 0;
}

void KnowledgeGraph::check_invariants() const {
    std::shared_lock lock(mutex_);
    for (const auto& [id, node] : nodes_) {
        if (id != node_id_for(node.label, node.properties)) {
            raise(Errc::schema_violation, "node id '" + id + "' disagrees with its natural key");
        }
        for (const auto& key : label_schema(node.label).required) {
            if (!node.properties.contains(key)) {
                raise(Errc::schema_violation, id + " lost required property '" + key + "'");
            }
        }
    }
    for (const auto& edge : edges_) {
        auto src_it = nodes_.find(edge.src);
        auto dst_it = nodes_.find(edge.dst);
        if (src_it == nodes_.end() || dst_it == nodes_.end()) {
            raise(Errc::dangling_edge, "edge references removed node");
        }
        if (!relation_allowed(edge.relation, src_it->second.label, dst_it->second.label)) {
            raise(Errc::schema_violation, "edge violates relation table");
        }
    }
}

void KnowledgeGraph::export_jsonl(std::ostream& out) const {
    std::shared_lock lock(mutex_);
    for (const auto& [id, node] : nodes_) {
        nlohmann::json record{{"type", "node"},
                              {"id", id},
                              {"label", to_string(node.label)},
                              {"properties", node.properties}};
        if (node.event_time) {
            record["event_time"] = node.event_time->str();
        }
        out << record.dump() << '\n';
    }
    for (const auto& edge : edges_) {
        nlohmann::json record{
            {"type", "edge"}, {"src", edge.src}, {"dst", edge.dst}, {"relation", to_string(edge.relation)}};
        out << record.dump() << '\n';
    }
}

void KnowledgeGraph::import_jsonl(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<KGEdge> pending_edges;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.contains("type")) {
            raise(Errc::io_error, "graph import line " + std::to_string(line_no) + " is not a record");
        }
        if (record["type"] == "node") {
            std::optional<Date> when;
            if (record.contains("event_time")) {
                when = Date::parse(record["event_time"].get<std::string>());
            }
            upsert_node(parse_concept_label(record.at("label").get<std::string>()),
                        record.at("properties"), when);
        } else if (record["type"] == "edge") {
            pending_edges.push_back(KGEdge{record.at("src").get<std::string>(),
                                           record.at("dst").get<std::string>(),
                                           parse_relation(record.at("relation").get<std::string>())});
        } else {
            raise(Errc::io_error, "graph import line " + std::to_string(line_no) + ": unknown record type");
        }
    }
    for (const auto& edge : pending_edges) {
        std::unique_lock lock(mutex_);
        if (edge_exists_unlocked(edge)) {
            continue;
        }
        lock.unlock();
        add_edge(edge.src, edge.dst, edge.relation);
    }
}

} // namespace xdf::kg
