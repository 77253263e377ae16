#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_helpers.hpp"

#include "xdf/core/text.hpp"
#include "xdf/eval/metrics.hpp"
#include "xdf/pipeline/run.hpp"
#include "xdf/service/server.hpp"

#include "httplib.h"

#include <fstream>
#include <set>

using namespace xdf;

namespace {

pipeline::PipelineConfig fixture_config() {
    return pipeline::load_config(helpers::fixtures_dir() / "pipeline.json");
}

std::string slurp(const std::filesystem::path& path) {
    return xdf::read_file(path);
}

} // namespace

TEST_CASE("ingest populates the graph from the mapping rules") {
    auto config = fixture_config();
    kg::KnowledgeGraph graph;
    const auto summary = pipeline::ingest(config, graph);
    CHECK(summary.records_skipped == 0);
    CHECK(summary.nodes_created == graph.node_count());
    CHECK(graph.ids_with_label(kg::ConceptLabel::Product).size() == 5);
    CHECK(graph.ids_with_label(kg::ConceptLabel::MediaReportedEvent).size() == 60);
    CHECK(graph.ids_with_label(kg::ConceptLabel::ExternalDatasetMetadata).size() == 24);
    CHECK(graph.ids_with_label(kg::ConceptLabel::Attribute).size() == 13);
    CHECK(graph.ids_with_label(kg::ConceptLabel::AttributeAbstraction).size() == 13);
    CHECK(graph.abstraction_chain("F", 3) == std::vector<std::string>{"SAPD", "APD", "PD"});
    graph.check_invariants();
}

TEST_CASE("the fixture corpus yields one explanation per material and month") {
    auto config = fixture_config();
    const auto result = pipeline::run_pipeline(config);
    CHECK(result.skipped.empty());
    REQUIRE(result.explanations.size() == 15);

    std::set<std::string> seen;
    for (const auto& explanation : result.explanations) {
        seen.insert(explanation.material + "/" + explanation.target.str());
        // interval ordering and section counts
        CHECK(explanation.lower <= explanation.value);
        CHECK(explanation.value <= explanation.upper);
        CHECK(explanation.lower >= 0.0);
        CHECK(explanation.events.size() == 3);
        CHECK(explanation.keywords.size() == 3);
        CHECK_FALSE(explanation.dataset.id.empty());
        std::set<std::string> event_ids;
        std::set<std::string> ranked_ids;
        for (const auto& [feature_id, weight] : explanation.ranking) {
            (void)weight;
            ranked_ids.insert(feature_id);
        }
        for (const auto& event : explanation.events) {
            event_ids.insert(event.id);
            // provenance: the event came from a query built for a ranked feature
            CHECK(ranked_ids.count(event.feature_id) == 1);
        }
        CHECK(event_ids.size() == 3);
        CHECK(std::set<std::string>(explanation.keywords.begin(), explanation.keywords.end()).size() ==
              3);
    }
    CHECK(seen.size() == 15);

    // every explanation is navigable in the graph
    kg::Pattern pattern;
    pattern.label = kg::ConceptLabel::ForecastExplanation;
    pattern.steps = {{kg::Relation::explains, true, kg::ConceptLabel::Prediction, {}}};
    CHECK(result.graph.query_pattern(pattern).size() == 15);
}

TEST_CASE("temporal hygiene holds across the fixture run") {
    auto config = fixture_config();
    const auto result = pipeline::run_pipeline(config);
    REQUIRE(result.instances.size() == 15);
    REQUIRE(result.fold_training_bounds.size() == 15);
    std::size_t reference_checks = 0;
    for (std::size_t i = 0; i < result.instances.size(); ++i) {
        const auto& instance = result.instances[i];
        for (const auto& value : instance.values) {
            REQUIRE_FALSE(value.reference_months.empty());
            for (Month reference : value.reference_months) {
                CHECK(reference < instance.target);
                ++reference_checks;
            }
            if (value.feature_id == "F") { // min-max-scaled by configuration
                CHECK(value.value >= 0.0);
                CHECK(value.value <= 1.0);
            }
        }
        // the final model trained strictly before the explained month
        CHECK(result.fold_training_bounds[i] < instance.target);
    }
    CHECK(reference_checks > 15 * 13);
}

TEST_CASE("two runs are byte identical") {
    auto config = fixture_config();
    const auto dir_a = helpers::scratch_dir("pipeline-a");
    const auto dir_b = helpers::scratch_dir("pipeline-b");
    pipeline::run_pipeline_to(config, dir_a);
    pipeline::run_pipeline_to(config, dir_b);
    for (const char* name : {"explanations.jsonl", "predictions.jsonl", "kg_snapshot.jsonl",
                             "manifest.json"}) {
        CHECK(slurp(dir_a / name) == slurp(dir_b / name));
    }
}

TEST_CASE("a missing input file fails at startup without partial outputs") {
    auto config = fixture_config();
    config.inputs.embeddings = "/nonexistent/embeddings.bin";
    const auto dir = helpers::scratch_dir("pipeline-missing");
    helpers::expect_error(Errc::io_error, [&] { pipeline::run_pipeline_to(config, dir); });
    CHECK_FALSE(std::filesystem::exists(dir / "explanations.jsonl"));
}

TEST_CASE("the service answers from an immutable snapshot") {
    auto config = fixture_config();
    const auto dir = helpers::scratch_dir("pipeline-serve");
    const auto result = pipeline::run_pipeline_to(config, dir);
    REQUIRE(result.explanations.size() == 15);

    service::Server server(service::load_snapshot(dir));
    const int port = server.start_async("127.0.0.1");
    httplib::Client client("127.0.0.1", port);

    auto health = client.Get("/health");
    REQUIRE(health);
    CHECK(health->status == 200);

    auto materials = client.Get("/materials");
    REQUIRE(materials);
    auto material_list = nlohmann::json::parse(materials->body);
    CHECK(material_list.size() == 5);
    CHECK(material_list[0] == "M1");

    // forecast values match the on-disk records exactly
    std::ifstream predictions(dir / "predictions.jsonl");
    std::string line;
    std::getline(predictions, line);
    const auto expected = nlohmann::json::parse(line);
    auto forecast = client.Get("/forecasts/" + expected.at("material").get<std::string>() +
                               "?month=" + expected.at("month").get<std::string>());
    REQUIRE(forecast);
    CHECK(forecast->status == 200);
    CHECK(nlohmann::json::parse(forecast->body) == expected);

    const std::string id = result.explanations.front().id;
    auto planner = client.Get("/explanations/" + id + "?profile=planner");
    REQUIRE(planner);
    CHECK(planner->status == 200);
    auto planner_view = nlohmann::json::parse(planner->body);
    CHECK_FALSE(planner_view.contains("keywords"));
    CHECK_FALSE(planner_view.contains("dataset"));
    CHECK(planner_view.contains("events"));
    for (const std::string letter : {"A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K", "L",
                                     "M"}) {
        CHECK(planner->body.find("\"" + letter + "\"") == std::string::npos);
    }
    CHECK(planner->body.find("feature_id") == std::string::npos);
    CHECK(planner->get_header_value("Content-Type").find("application/json") == 0);

    auto expert = client.Get("/explanations/" + id + "?profile=expert");
    REQUIRE(expert);
    auto expert_view = nlohmann::json::parse(expert->body);
    CHECK(expert_view.contains("keywords"));
    CHECK(expert_view.contains("dataset"));
    CHECK(expert_view.contains("ranking"));

    auto missing = client.Get("/explanations/EXP-NOPE-2020-01");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    auto bad_profile = client.Get("/explanations/" + id + "?profile=auditor");
    REQUIRE(bad_profile);
    CHECK(bad_profile->status == 400);

    auto no_forecast = client.Get("/forecasts/M1?month=1999-01");
    REQUIRE(no_forecast);
    CHECK(no_forecast->status == 404);

    auto unknown = client.Get("/nothing/here");
    REQUIRE(unknown);
    CHECK(unknown->status == 404);

    server.stop();
}

TEST_CASE("generated explanations re-annotate cleanly through the metrics path") {
    auto config = fixture_config();
    const auto result = pipeline::run_pipeline(config);
    const auto dir = helpers::scratch_dir("pipeline-annotate");
    const auto path = dir / "annotations.csv";
    {
        std::ofstream out(path);
        out << "explanation_id,item_kind,rank,item_id,relevant\n";
        for (const auto& explanation : result.explanations) {
            for (std::size_t r = 0; r < explanation.events.size(); ++r) {
                out << explanation.id << ",event," << (r + 1) << "," << explanation.events[r].id
                    << ",1\n";
            }
            for (std::size_t r = 0; r < explanation.keywords.size(); ++r) {
                out << explanation.id << ",keyword," << (r + 1) << "," << explanation.keywords[r]
                    << ",1\n";
            }
            out << explanation.id << ",dataset,1," << explanation.dataset.id << ",0\n";
        }
    }
    const auto records = eval::load_annotations(path);
    CHECK(records.size() == 15 * 7);
    const auto metrics = eval::report(records);
    CHECK(metrics.explanation_count == 15);
    // everything marked relevant except datasets
    CHECK(metrics.events.average_precision_at_1 == 1.0);
    CHECK(metrics.events.average_precision_at_3 == 1.0);
    CHECK(metrics.keywords.average_precision_at_3 == 1.0);
    CHECK(metrics.dataset_accuracy == 0.0);
    // diversity bounded by construction: 15 entries per kind at k=1
    CHECK(metrics.events.rde_at_1 > 0.0);
    CHECK(metrics.events.rde_at_1 <= 1.0);
    CHECK(metrics.dataset_rde > 0.0);
}

TEST_CASE("manifest counts describe the run") {
    auto config = fixture_config();
    const auto result = pipeline::run_pipeline(config);
    const auto& counts = result.manifest.at("counts");
    CHECK(counts.at("materials") == 5);
    CHECK(counts.at("explanations") == 15);
    CHECK(counts.at("records_skipped") == 0);
    CHECK(counts.at("nodes_created").get<std::size_t>() > 100);
    CHECK(result.manifest.at("version") == pipeline::kVersion);
    CHECK(result.manifest.contains("config_hash"));
}
