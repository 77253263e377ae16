#pragma once

#include "xdf/explain/builder.hpp"
#include "xdf/kg/graph.hpp"
#include "xdf/pipeline/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace xdf::pipeline {

inline constexpr const char* kVersion = "0.1.0";

struct SkippedPair {
    std::string material;
    Month target;
    std::string reason;
};

struct RunResult {
    std::vector<explain::ForecastExplanation> explanations; // (material, month) ordered
    std::vector<forecast::Prediction> predictions;
    std::vector<forecast::FeatureVector> instances; // aligned with explanations
    std::vector<Month> fold_training_bounds;        // last training month per explanation
    kg::KnowledgeGraph graph;
    std::vector<SkippedPair> skipped;
    nlohmann::json manifest;
};

/// Ingests the input corpus into a fresh knowledge graph using the
/// declarative mapping rules. Returns the populated graph and the ingestion
/// summary.
kg::IngestionSummary ingest(const PipelineConfig& config, kg::KnowledgeGraph& graph);

/**
 * The full batch run: ingest, then per selected (material, target month)
 * build features, train through nested cross-validation, predict with
 * uncertainty, explain the prediction locally, build temporally-aligned
 * media queries, extract keywords, rank external datasets, diversity-sample
 * the displayed entries and persist the assembled explanation. Fully
 * deterministic given the config (all sampling is keyed by the config seed,
 * material and month). Pairs that cannot be completed are skipped and
 * listed in the manifest.
 */
RunResult run_pipeline(const PipelineConfig& config);

/// Runs the pipeline and writes explanations.jsonl, predictions.jsonl,
/// kg_snapshot.jsonl and manifest.json under out_dir.
RunResult run_pipeline_to(const PipelineConfig& config, const std::filesystem::path& out_dir);

} // namespace xdf::pipeline
