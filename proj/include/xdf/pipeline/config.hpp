#pragma once

#include "xdf/analyzer/surrogate.hpp"
#include "xdf/forecast/cv.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace xdf::pipeline {

struct InputPaths {
    std::filesystem::path demand;
    std::filesystem::path indicators;
    std::filesystem::path plan;
    std::filesystem::path working_days;
    std::filesystem::path events;
    std::filesystem::path datasets;
    std::filesystem::path embeddings;
    std::filesystem::path stopwords;
    std::filesystem::path noun_lexicon;
    std::filesystem::path mapping_rules;
    std::filesystem::path feature_specs;
    std::filesystem::path abstraction;
};

struct ForecastConfig {
    std::vector<forecast::SvrParams> grid;
    forecast::CvConfig cv;
    double q_low = 0.1;
    double q_high = 0.9;
};

struct MediaConfig {
    int closeness_days = 15;
    std::size_t max_events_per_query = 50;
    std::size_t event_pool = 10;
    std::size_t keyword_pool = 10;
    std::size_t display_events = 3;
    std::size_t display_keywords = 3;
};

struct RecommenderConfig {
    std::size_t top_n = 10;
    std::size_t dataset_pool = 10;
    std::size_t display_datasets = 1;
    std::size_t max_candidates = 100; // portal query result cap
};

struct PipelineConfig {
    InputPaths inputs;
    std::vector<std::string> materials; // empty = every material in the demand file
    int explain_months = 3;             // last N months of the demand history
    std::string region = "EU";          // indicator region
    ForecastConfig forecast;
    analyzer::AnalyzerConfig analyzer;
    MediaConfig media;
    RecommenderConfig recommender;
    int min_abstraction_level = 1;
    int kg_retention_days = 1460;
    std::uint64_t seed = 1;
    bool parallel = true;
};

/// Reads the configuration document; relative input paths are resolved
/// against the config file's directory. Defaults match the bundled fixture
/// run. Throws ConfigError on invalid values.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(const nlohmann::json& document, const std::filesystem::path& base_dir);

/// Canonical JSON used for the manifest's config hash.
nlohmann::json to_json(const PipelineConfig& config);

} // namespace xdf::pipeline
