#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_helpers.hpp"

#include "xdf/kg/graph.hpp"
#include "xdf/kg/mapping.hpp"

#include <atomic>
#include <sstream>
#include <thread>

using namespace xdf;
using namespace xdf::kg;

namespace {

/// Fig.-2-shaped hierarchy plus a couple of mapped features.
void seed_hierarchy(KnowledgeGraph& graph) {
    const std::vector<std::pair<std::string, std::string>> concepts = {
        {"PS", ""},    {"PPS", "PS"},  {"CPS", "PS"},    {"PD", ""},   {"APD", "PD"},
        {"RPD", "PD"}, {"SAPD", "APD"}, {"WAPD", "APD"}, {"WDAPD", "APD"}, {"EC", ""},
        {"PMI", "EC"}, {"GDP", "EC"},  {"UE", "EC"},
    };
    for (const auto& [name, parent] : concepts) {
        graph.upsert_node(ConceptLabel::AttributeAbstraction, {{"name", name}});
        (void)parent;
    }
    for (const auto& [name, parent] : concepts) {
        if (!parent.empty()) {
            graph.add_edge("AttributeAbstraction:" + name, "AttributeAbstraction:" + parent,
                           Relation::parentConcept);
        }
    }
    graph.upsert_node(ConceptLabel::Attribute, {{"feature_id", "F"}});
    graph.add_edge("Attribute:F", "AttributeAbstraction:SAPD", Relation::abstractedBy);
    graph.upsert_node(ConceptLabel::Attribute, {{"feature_id", "K"}});
    graph.add_edge("Attribute:K", "AttributeAbstraction:PMI", Relation::abstractedBy);
}

MappingRule product_rule() {
    MappingRule rule;
    rule.name = "product";
    rule.source = "demand";
    rule.label = ConceptLabel::Product;
    rule.properties = {{"material", "material", "", false, false}};
    return rule;
}

MappingRule feature_vector_rule() {
    MappingRule rule;
    rule.name = "feature-vector";
    rule.source = "demand";
    rule.label = ConceptLabel::FeatureVector;
    rule.properties = {{"material", "material", "", false, false},
                       {"month", "month", "", false, false}};
    EdgeTemplate edge;
    edge.relation = Relation::describedBy;
    edge.node_is_src = false; // Product -> describedBy -> FeatureVector
    edge.other_label = ConceptLabel::Product;
    edge.other_key = {{"material", "material", "", false, false}};
    rule.edges.push_back(edge);
    return rule;
}

FlatRecord demand_record(const std::string& material, const std::string& month,
                         const std::string& qty) {
    FlatRecord record;
    record.source = "demand";
    record.fields = {{"material", material}, {"month", month}, {"quantity", qty}};
    return record;
}

} // namespace

TEST_CASE("node and edge schema is enforced") {
    KnowledgeGraph graph;
    helpers::expect_error(Errc::schema_violation, [&] {
        graph.upsert_node(ConceptLabel::Prediction, {{"material", "M1"}}); // misses required props
    });
    helpers::expect_error(Errc::schema_violation, [&] {
        graph.upsert_node(ConceptLabel::Product, {{"material", "M1"}, {"color", "red"}});
    });
    graph.upsert_node(ConceptLabel::Product, {{"material", "M1"}});
    graph.upsert_node(ConceptLabel::Attribute, {{"feature_id", "A"}});
    helpers::expect_error(Errc::schema_violation, [&] {
        graph.add_edge("Product:M1", "Attribute:A", Relation::parentConcept);
    });
    helpers::expect_error(Errc::dangling_edge, [&] {
        graph.add_edge("Product:M1", "Attribute:Z", Relation::hasAttribute);
    });
    helpers::expect_error(Errc::unknown_label, [] { parse_concept_label("Widget"); });
    helpers::expect_error(Errc::unknown_relation, [] { parse_relation("knows"); });
    graph.check_invariants();
}

TEST_CASE("apply_mapping instantiates product and feature vector from one record") {
    KnowledgeGraph graph;
    const std::vector<MappingRule> rules = {product_rule(), feature_vector_rule()};
    const std::vector<FlatRecord> records = {demand_record("M1", "2020-03", "40")};
    const auto summary = apply_mapping(graph, records, rules);
    CHECK(summary.nodes_created == 2);
    CHECK(summary.edges_created == 1);
    CHECK(summary.records_skipped == 0);
    CHECK(graph.find("Product:M1") != nullptr);
    CHECK(graph.find("FeatureVector:M1:2020-03") != nullptr);
    graph.check_invariants();
}

TEST_CASE("apply_mapping on an empty record sequence does nothing") {
    KnowledgeGraph graph;
    const std::vector<MappingRule> rules = {product_rule()};
    const auto summary = apply_mapping(graph, std::vector<FlatRecord>{}, rules);
    CHECK(summary.nodes_created == 0);
    CHECK(summary.edges_created == 0);
    CHECK(summary.records_skipped == 0);
}

TEST_CASE("apply_mapping is idempotent") {
    KnowledgeGraph graph;
    const std::vector<MappingRule> rules = {product_rule(), feature_vector_rule()};
    std::vector<FlatRecord> records;
    for (int i = 0; i < 10; ++i) {
        records.push_back(demand_record("M" + std::to_string(i % 3), "2020-0" + std::to_string(1 + i % 9), "5"));
    }
    const auto first = apply_mapping(graph, records, rules);
    CHECK(first.nodes_created > 0);
    const auto nodes_after_first = graph.node_count();
    const auto edges_after_first = graph.edge_count();
    const auto second = apply_mapping(graph, records, rules);
    CHECK(second.nodes_created == 0);
    CHECK(second.edges_created == 0);
    CHECK(second.records_skipped == 0);
    CHECK(graph.node_count() == nodes_after_first);
    CHECK(graph.edge_count() == edges_after_first);
}

TEST_CASE("records with unresolvable pieces are skipped and counted") {
    KnowledgeGraph graph;
    std::vector<MappingRule> rules = {feature_vector_rule()}; // no product rule this time
    FlatRecord incomplete;
    incomplete.source = "demand";
    incomplete.fields = {{"material", "M9"}}; // month missing
    const std::vector<FlatRecord> records = {incomplete, demand_record("M7", "2020-01", "3")};
    const auto summary = apply_mapping(graph, records, rules);
    // both fail: the first lacks a bound field, the second dangles on Product:M7
    CHECK(summary.nodes_created == 0);
    CHECK(summary.records_skipped == 2);
}

TEST_CASE("rule validation rejects undeclared properties") {
    MappingRule bad = product_rule();
    bad.properties.push_back({"color", "color", "", false, false});
    helpers::expect_error(Errc::schema_violation,
                          [&] { validate_rules(std::vector<MappingRule>{bad}); });
}

TEST_CASE("query_pattern walks relations in both directions") {
    KnowledgeGraph graph;
    for (int i = 1; i <= 3; ++i) {
        graph.upsert_node(ConceptLabel::Prediction, {{"material", "M" + std::to_string(i)},
                                                     {"month", "2020-06"},
                                                     {"value", 10.0 * i},
                                                     {"lower", 1.0},
                                                     {"upper", 100.0}});
    }
    for (int i = 1; i <= 2; ++i) {
        const std::string id = "X" + std::to_string(i);
        graph.upsert_node(ConceptLabel::ForecastExplanation, {{"explanation_id", id}});
        graph.add_edge("ForecastExplanation:" + id, "Prediction:M" + std::to_string(i) + ":2020-06",
                       Relation::explains);
    }

    Pattern backward;
    backward.label = ConceptLabel::Prediction;
    backward.steps = {{Relation::explains, false, ConceptLabel::ForecastExplanation, {}}};
    auto rows = graph.query_pattern(backward);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"Prediction:M1:2020-06", "ForecastExplanation:X1"});
    CHECK(rows[1] == std::vector<std::string>{"Prediction:M2:2020-06", "ForecastExplanation:X2"});

    Pattern filtered;
    filtered.label = ConceptLabel::Prediction;
    filtered.filters = {{"month", "2020-07"}};
    CHECK(graph.query_pattern(filtered).empty());

    Pattern forward;
    forward.label = ConceptLabel::ForecastExplanation;
    forward.steps = {{Relation::explains, true, ConceptLabel::Prediction, {{"material", "M2"}}}};
    rows = graph.query_pattern(forward);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0][1] == "Prediction:M2:2020-06");
}

TEST_CASE("abstraction_chain follows the hierarchy upward") {
    KnowledgeGraph graph;
    seed_hierarchy(graph);
    CHECK(graph.abstraction_chain("F", 2) == std::vector<std::string>{"SAPD", "APD"});
    CHECK(graph.abstraction_chain("F", 3) == std::vector<std::string>{"SAPD", "APD", "PD"});
    CHECK(graph.abstraction_chain("F", 1) == std::vector<std::string>{"SAPD"});
    // root terminates the walk even with levels to spare
    CHECK(graph.abstraction_chain("K", 5) == std::vector<std::string>{"PMI", "EC"});
    helpers::expect_error(Errc::unknown_attribute, [&] { graph.abstraction_chain("Z", 2); });

    // an Attribute without abstractedBy is unknown too
    graph.upsert_node(ConceptLabel::Attribute, {{"feature_id", "Q"}});
    helpers::expect_error(Errc::unknown_attribute, [&] { graph.abstraction_chain("Q", 2); });
}

TEST_CASE("abstraction_chain refuses a cyclic hierarchy") {
    KnowledgeGraph graph;
    graph.upsert_node(ConceptLabel::AttributeAbstraction, {{"name", "A1"}});
    graph.upsert_node(ConceptLabel::AttributeAbstraction, {{"name", "A2"}});
    graph.add_edge("AttributeAbstraction:A1", "AttributeAbstraction:A2", Relation::parentConcept);
    graph.add_edge("AttributeAbstraction:A2", "AttributeAbstraction:A1", Relation::parentConcept);
    graph.upsert_node(ConceptLabel::Attribute, {{"feature_id", "A"}});
    graph.add_edge("Attribute:A", "AttributeAbstraction:A1", Relation::abstractedBy);
    helpers::expect_error(Errc::cycle_detected, [&] { graph.abstraction_chain("A", 10); });
}

TEST_CASE("prune_window removes stale instance data and their edges") {
    KnowledgeGraph graph;
    const Date now(2020, 6, 15);
    graph.upsert_node(ConceptLabel::InformationProvenance, {{"source_name", "wire"}});
    graph.upsert_node(ConceptLabel::MediaReportedEvent,
                      {{"event_id", "recent"}, {"date", "2020-06-05"}, {"title", "t"}},
                      now.plus_days(-10));
    graph.upsert_node(ConceptLabel::MediaReportedEvent,
                      {{"event_id", "ancient"}, {"date", "2019-05-05"}, {"title", "t"}},
                      now.plus_days(-400));
    graph.add_edge("MediaReportedEvent:recent", "InformationProvenance:wire", Relation::fromProvenance);
    graph.add_edge("MediaReportedEvent:ancient", "InformationProvenance:wire", Relation::fromProvenance);

    CHECK(graph.prune_window(now, 365) == 1);
    CHECK(graph.find("MediaReportedEvent:ancient") == nullptr);
    CHECK(graph.find("MediaReportedEvent:recent") != nullptr);
    CHECK(graph.find("InformationProvenance:wire") != nullptr); // no event_time, retained
    CHECK(graph.edge_count() == 1);
    graph.check_invariants();

    CHECK(graph.prune_window(now, 365) == 0);   // idempotent
    CHECK(graph.prune_window(now, 100000) == 0); // window larger than graph age
}

TEST_CASE("readers run concurrently with a single writer") {
    KnowledgeGraph graph;
    seed_hierarchy(graph);
    std::atomic<std::size_t> reads{0};
    std::vector<std::thread> readers;
    for (int t = 0; t < 2; ++t) {
        readers.emplace_back([&] {
            for (int i = 0; i < 200; ++i) {
                Pattern pattern;
                pattern.label = ConceptLabel::AttributeAbstraction;
                (void)graph.query_pattern(pattern);
                (void)graph.abstraction_chain("F", 3);
                reads.fetch_add(1);
            }
        });
    }
    std::thread writer([&] {
        for (int i = 0; i < 100; ++i) {
            graph.upsert_node(ConceptLabel::MediaReportedEvent,
                              {{"event_id", "c" + std::to_string(i)},
                               {"date", "2020-01-01"},
                               {"title", "t"}},
                              Date(2020, 1, 1));
        }
    });
    for (auto& reader : readers) {
        reader.join();
    }
    writer.join();
    CHECK(reads.load() == 400);
    CHECK(graph.ids_with_label(ConceptLabel::MediaReportedEvent).size() == 100);
    graph.check_invariants();
}

TEST_CASE("export/import round trips the graph") {
    KnowledgeGraph graph;
    seed_hierarchy(graph);
    graph.upsert_node(ConceptLabel::Product, {{"material", "M1"}});
    std::ostringstream out;
    graph.export_jsonl(out);

    KnowledgeGraph copy;
    std::istringstream in(out.str());
    copy.import_jsonl(in);
    CHECK(copy.node_count() == graph.node_count());
    CHECK(copy.edge_count() == graph.edge_count());
    std::ostringstream again;
    copy.export_jsonl(again);
    CHECK(again.str() == out.str());
}
