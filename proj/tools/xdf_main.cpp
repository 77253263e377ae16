#include "xdf/eval/metrics.hpp"
#include "xdf/kg/graph.hpp"
#include "xdf/pipeline/run.hpp"
#include "xdf/service/server.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

namespace {

xdf::pipeline::PipelineConfig load_with_overrides(const std::string& config_path,
                                                  std::int64_t seed_override) {
    auto config = xdf::pipeline::load_config(config_path);
    if (seed_override >= 0) {
        config.seed = static_cast<std::uint64_t>(seed_override);
    }
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Explainable demand forecasting pipeline"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path = "fixtures/pipeline.json";
    std::string out_dir = "out";
    std::int64_t seed_override = -1;
    app.add_option("--config", config_path, "Pipeline configuration file");
    app.add_option("--out-dir", out_dir, "Output directory");
    app.add_option("--seed-override", seed_override, "Override the configured seed");

    auto* ingest_cmd = app.add_subcommand("ingest", "Run the ETL and export the knowledge graph");

    auto* explain_cmd = app.add_subcommand("explain", "Run the full pipeline and write explanations");

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score an annotation file");
    std::string annotations_path;
    evaluate_cmd->add_option("annotations", annotations_path, "Annotation file")->required();

    auto* serve_cmd = app.add_subcommand("serve", "Serve pipeline outputs over HTTP");
    std::string host = "0.0.0.0";
    int port = 8080;
    serve_cmd->add_option("--host", host, "Bind address");
    serve_cmd->add_option("--port", port, "Port");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest_cmd->parsed()) {
            const auto config = load_with_overrides(config_path, seed_override);
            xdf::kg::KnowledgeGraph graph;
            const auto summary = xdf::pipeline::ingest(config, graph);
            std::filesystem::create_directories(out_dir);
            std::ofstream out(std::filesystem::path(out_dir) / "kg_snapshot.jsonl", std::ios::binary);
            graph.export_jsonl(out);
            std::cout << "nodes_created " << summary.nodes_created << "\n"
                      << "edges_created " << summary.edges_created << "\n"
                      << "records_skipped " << summary.records_skipped << "\n";
        } else if (explain_cmd->parsed()) {
            const auto config = load_with_overrides(config_path, seed_override);
            const auto result = xdf::pipeline::run_pipeline_to(config, out_dir);
            std::cout << "explanations " << result.explanations.size() << "\n"
                      << "skipped " << result.skipped.size() << "\n"
                      << "outputs " << out_dir << "\n";
        } else if (evaluate_cmd->parsed()) {
            const auto annotations = xdf::eval::load_annotations(annotations_path);
            const auto metrics = xdf::eval::report(annotations);
            std::filesystem::create_directories(out_dir);
            std::ofstream out(std::filesystem::path(out_dir) / "metrics.json", std::ios::binary);
            out << xdf::eval::to_json(metrics).dump(2) << "\n";
            std::cout << xdf::eval::render_table(metrics);
        } else if (serve_cmd->parsed()) {
            auto snapshot = xdf::service::load_snapshot(out_dir);
            std::cout << "serving " << snapshot.explanations.size() << " explanations on " << host
                      << ":" << port << "\n";
            xdf::service::Server server(std::move(snapshot));
            server.run(host, port);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
