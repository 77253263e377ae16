#include "xdf/kg/mapping.hpp"

#include "xdf/core/text.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <set>

namespace xdf::kg {

namespace {

PropertyBinding parse_binding(const std::string& property, const nlohmann::json& spec) {
    PropertyBinding binding;
    binding.property = property;
    if (spec.is_string()) {
        binding.field = spec.get<std::string>();
        return binding;
    }
    if (spec.is_object()) {
        if (spec.contains("const")) {
            binding.is_const = true;
            binding.const_value = spec.at("const").get<std::string>();
        } else {
            binding.field = spec.at("field").get<std::string>();
        }
        binding.numeric = spec.value("numeric", false);
        return binding;
    }
    raise(Errc::schema_violation, "binding for '" + property + "' must be a field name or object");
}

std::vector<PropertyBinding> parse_bindings(const nlohmann::json& object) {
    std::vector<PropertyBinding> bindings;
    for (const auto& [property, spec] : object.items()) {
        bindings.push_back(parse_binding(property, spec));
    }
    std::sort(bindings.begin(), bindings.end(),
              [](const PropertyBinding& a, const PropertyBinding& b) { return a.property < b.property; });
    return bindings;
}

/// Resolves bindings against a record; nullopt when a referenced field is
/// absent or a numeric value fails to parse.
std::optional<nlohmann::json> bind_properties(std::span<const PropertyBinding> bindings,
                                              const FlatRecord& record) {
    nlohmann::json properties = nlohmann::json::object();
    for (const auto& binding : bindings) {
        std::string raw;
        if (binding.is_const) {
            raw = binding.const_value;
        } else {
            auto it = record.fields.find(binding.field);
            if (it == record.fields.end()) {
                return std::nullopt;
            }
            raw = it->second;
        }
        if (binding.numeric) {
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
            if (ec != std::errc{} || ptr != raw.data() + raw.size()) {
                return std::nullopt;
            }
            properties[binding.property] = value;
        } else {
            properties[binding.property] = raw;
        }
    }
    return properties;
}

bool selector_matches(const MappingRule& rule, const FlatRecord& record) {
    if (record.source != rule.source) {
        return false;
    }
    for (const auto& [field, expected] : rule.selector) {
        auto it = record.fields.find(field);
        if (it == record.fields.end() || it->second != expected) {
            return false;
        }
    }
    return true;
}

std::optional<Date> bind_event_time(const MappingRule& rule, const FlatRecord& record) {
    if (rule.event_time_field.empty()) {
        return std::nullopt;
    }
    auto it = record.fields.find(rule.event_time_field);
    if (it == record.fields.end()) {
        return std::nullopt;
    }
    const std::string& raw = it->second;
    if (raw.size() == 7) {
        return Month::parse(raw).first_day();
    }
    return Date::parse(raw);
}

struct PlannedNode {
    std::string id;
    ConceptLabel label;
    nlohmann::json properties;
    std::optional<Date> event_time;
    std::size_t record_index;
    std::vector<std::pair<KGEdge, bool>> edges; // edge + resolved flag
};

} // namespace

std::vector<MappingRule> parse_mapping_rules(const nlohmann::json& document) {
    std::vector<MappingRule> rules;
    for (const auto& entry : document.at("rules")) {
        MappingRule rule;
        rule.name = entry.value("name", "");
        rule.source = entry.at("source").get<std::string>();
        if (entry.contains("selector")) {
            for (const auto& [field, value] : entry.at("selector").items()) {
                rule.selector[field] = value.get<std::string>();
            }
        }
        rule.label = parse_concept_label(entry.at("label").get<std::string>());
        rule.properties = parse_bindings(entry.at("properties"));
        rule.event_time_field = entry.value("event_time_field", "");
        if (entry.contains("edges")) {
            for (const auto& edge_spec : entry.at("edges")) {
                EdgeTemplate tmpl;
                tmpl.relation = parse_relation(edge_spec.at("relation").get<std::string>());
                tmpl.node_is_src = edge_spec.value("direction", "out") != "in";
                tmpl.other_label = parse_concept_label(edge_spec.at("other_label").get<std::string>());
                tmpl.other_key = parse_bindings(edge_spec.at("other_key"));
                rule.edges.push_back(std::move(tmpl));
            }
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

std::vector<MappingRule> load_mapping_rules(const std::filesystem::path& path) {
    return parse_mapping_rules(nlohmann::json::parse(read_file(path)));
}

void validate_rules(std::span<const MappingRule> rules) {
    for (const auto& rule : rules) {
        const auto& schema = label_schema(rule.label);
        auto declared = [&](const std::string& property) {
            return std::find(schema.required.begin(), schema.required.end(), property) != schema.required.end() ||
                   std::find(schema.optional.begin(), schema.optional.end(), property) != schema.optional.end();
        };
        for (const auto& binding : rule.properties) {
            if (!declared(binding.property)) {
                raise(Errc::schema_violation, "rule '" + rule.name + "' binds undeclared property '" +
                                                  binding.property + "' on " + to_string(rule.label));
            }
        }
        for (const auto& key : schema.natural_key) {
            const bool bound = std::any_of(rule.properties.begin(), rule.properties.end(),
                                           [&](const PropertyBinding& b) { return b.property == key; });
            if (!bound) {
                raise(Errc::schema_violation, "rule '" + rule.name + "' leaves natural key property '" +
                                                  key + "' unbound");
            }
        }
        for (const auto& edge : rule.edges) {
            const ConceptLabel src = edge.node_is_src ? rule.label : edge.other_label;
            const ConceptLabel dst = edge.node_is_src ? edge.other_label : rule.label;
            if (!relation_allowed(edge.relation, src, dst)) {
                raise(Errc::schema_violation, "rule '" + rule.name + "' declares a " +
                                                  std::string(to_string(edge.relation)) +
                                                  " edge outside the relation table");
            }
            const auto& other_schema = label_schema(edge.other_label);
            for (const auto& key : other_schema.natural_key) {
                const bool bound = std::any_of(edge.other_key.begin(), edge.other_key.end(),
                                               [&](const PropertyBinding& b) { return b.property == key; });
                if (!bound) {
                    raise(Errc::schema_violation, "rule '" + rule.name +
                                                      "' edge endpoint misses key property '" + key + "'");
                }
            }
        }
    }
}

IngestionSummary apply_mapping(KnowledgeGraph& graph, std::span<const FlatRecord> records,
                               std::span<const MappingRule> rules) {
    validate_rules(rules);
    IngestionSummary summary;

    // Pass 1: resolve every (record, rule) match into a planned node, and
    // collect the ids that this batch alone would introduce.
    std::vector<PlannedNode> planned;
    std::vector<bool> record_failed(records.size(), false);
    for (std::size_t r = 0; r < records.size(); ++r) {
        for (const auto& rule : rules) {
            if (!selector_matches(rule, records[r])) {
                continue;
            }
            auto properties = bind_properties(rule.properties, records[r]);
            if (!properties) {
                record_failed[r] = true;
                continue;
            }
            PlannedNode node;
            node.label = rule.label;
            node.properties = std::move(*properties);
            node.event_time = bind_event_time(rule, records[r]);
            node.id = node_id_for(node.label, node.properties);
            node.record_index = r;
            bool edges_ok = true;
            for (const auto& tmpl : rule.edges) {
                auto key = bind_properties(tmpl.other_key, records[r]);
                if (!key) {
                    edges_ok = false;
                    break;
                }
                const std::string other_id = node_id_for(tmpl.other_label, *key);
                KGEdge edge{tmpl.node_is_src ? node.id : other_id, tmpl.node_is_src ? other_id : node.id,
                            tmpl.relation};
                node.edges.emplace_back(std::move(edge), false);
            }
            if (!edges_ok) {
                record_failed[r] = true;
                continue;
            }
            planned.push_back(std::move(node));
        }
    }

    // Pass 2: endpoints must exist in the graph already or be introduced by
    // a surviving record of this batch; otherwise the whole record is
    // skipped. Skipping a record can orphan others, so iterate to a fixed
    // point.
    bool changed = true;
    while (changed) {
        changed = false;
        std::set<std::string> live_ids;
        for (const auto& node : planned) {
            if (!record_failed[node.record_index]) {
                live_ids.insert(node.id);
            }
        }
        for (const auto& node : planned) {
            if (record_failed[node.record_index]) {
                continue;
            }
            for (const auto& [edge, resolved] : node.edges) {
                (void)resolved;
                const std::string& other = edge.src == node.id ? edge.dst : edge.src;
                if (graph.find(other) == nullptr && live_ids.count(other) == 0) {
                    record_failed[node.record_index] = true;
                    changed = true;
                }
            }
        }
    }

    // Pass 3: materialize nodes then edges for the surviving records.
    for (const auto& node : planned) {
        if (record_failed[node.record_index]) {
            continue;
        }
        auto [id, created] = graph.upsert_node(node.label, node.properties, node.event_time);
        (void)id;
        if (created) {
            ++summary.nodes_created;
        }
    }
    for (const auto& node : planned) {
        if (record_failed[node.record_index]) {
            continue;
        }
        for (const auto& [edge, resolved] : node.edges) {
            (void)resolved;
            if (graph.add_edge(edge.src, edge.dst, edge.relation)) {
                ++summary.edges_created;
            }
        }
    }
    summary.records_skipped =
        static_cast<std::size_t>(std::count(record_failed.begin(), record_failed.end(), true));
    return summary;
}

} // namespace xdf::kg
