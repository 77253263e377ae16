#include "xdf/pipeline/config.hpp"

#include "xdf/core/error.hpp"
#include "xdf/core/text.hpp"

namespace xdf::pipeline {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    std::filesystem::path p(value);
    return p.is_absolute() ? p : base / p;
}

} // namespace

PipelineConfig parse_config(const nlohmann::json& document, const std::filesystem::path& base_dir) {
    PipelineConfig config;
    const auto& inputs = document.at("inputs");
    config.inputs.demand = resolve(base_dir, inputs.at("demand").get<std::string>());
    config.inputs.indicators = resolve(base_dir, inputs.at("indicators").get<std::string>());
    config.inputs.plan = resolve(base_dir, inputs.at("plan").get<std::string>());
    config.inputs.working_days = resolve(base_dir, inputs.at("working_days").get<std::string>());
    config.inputs.events = resolve(base_dir, inputs.at("events").get<std::string>());
    config.inputs.datasets = resolve(base_dir, inputs.at("datasets").get<std::string>());
    config.inputs.embeddings = resolve(base_dir, inputs.at("embeddings").get<std::string>());
    config.inputs.stopwords = resolve(base_dir, inputs.at("stopwords").get<std::string>());
    config.inputs.noun_lexicon = resolve(base_dir, inputs.at("noun_lexicon").get<std::string>());
    config.inputs.mapping_rules = resolve(base_dir, inputs.at("mapping_rules").get<std::string>());
    config.inputs.feature_specs = resolve(base_dir, inputs.at("feature_specs").get<std::string>());
    config.inputs.abstraction = resolve(base_dir, inputs.at("abstraction").get<std::string>());

    if (document.contains("materials")) {
        config.materials = document.at("materials").get<std::vector<std::string>>();
    }
    config.explain_months = document.value("explain_months", 3);
    config.region = document.value("region", "EU");

    if (document.contains("forecast")) {
        const auto& fc = document.at("forecast");
        if (fc.contains("grid")) {
            for (const auto& entry : fc.at("grid")) {
                forecast::SvrParams params;
                params.C = entry.at("C").get<double>();
                params.epsilon = entry.at("epsilon").get<double>();
                config.forecast.grid.push_back(params);
            }
        }
        config.forecast.cv.outer_months = fc.value("outer_months", 8);
        config.forecast.cv.min_train = fc.value("min_train", 4);
        config.forecast.cv.inner_months = fc.value("inner_months", 3);
        config.forecast.cv.schedule.iterations = fc.value("iterations", 600);
        config.forecast.cv.schedule.learning_rate = fc.value("learning_rate", 0.1);
        config.forecast.q_low = fc.value("q_low", 0.1);
        config.forecast.q_high = fc.value("q_high", 0.9);
    }
    if (config.forecast.grid.empty()) {
        config.forecast.grid = {{1.0, 0.1}, {100.0, 0.1}};
    }

    if (document.contains("analyzer")) {
        const auto& an = document.at("analyzer");
        config.analyzer.n_samples = an.value("n_samples", 512);
        config.analyzer.sigma = an.value("sigma", 0.0);
        config.analyzer.top_k = an.value("top_k", 4);
        config.analyzer.seed = an.value("seed", std::uint64_t{0});
        config.analyzer.lambda = an.value("lambda", 1e-6);
    }
    if (document.contains("media")) {
        const auto& media = document.at("media");
        config.media.closeness_days = media.value("closeness_days", 15);
        config.media.max_events_per_query = media.value("max_events_per_query", std::size_t{50});
        config.media.event_pool = media.value("event_pool", std::size_t{10});
        config.media.keyword_pool = media.value("keyword_pool", std::size_t{10});
        config.media.display_events = media.value("display_events", std::size_t{3});
        config.media.display_keywords = media.value("display_keywords", std::size_t{3});
    }
    if (document.contains("recommender")) {
        const auto& rec = document.at("recommender");
        config.recommender.top_n = rec.value("top_n", std::size_t{10});
        config.recommender.dataset_pool = rec.value("dataset_pool", std::size_t{10});
        config.recommender.display_datasets = rec.value("display_datasets", std::size_t{1});
        config.recommender.max_candidates = rec.value("max_candidates", std::size_t{100});
    }
    config.min_abstraction_level = document.value("min_abstraction_level", 1);
    config.kg_retention_days = document.value("kg_retention_days", 1460);
    config.seed = document.value("seed", std::uint64_t{1});
    config.parallel = document.value("parallel", true);

    if (config.explain_months < 1 || config.media.display_events < 1 ||
        config.media.display_keywords < 1 || config.recommender.display_datasets < 1) {
        raise(Errc::config_error, "counts must be at least 1");
    }
    if (config.media.event_pool < config.media.display_events ||
        config.media.keyword_pool < config.media.display_keywords ||
        config.recommender.dataset_pool < config.recommender.display_datasets) {
        raise(Errc::config_error, "candidate pools must cover the display counts");
    }
    return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    nlohmann::json document = nlohmann::json::parse(read_file(path), nullptr, false);
    if (document.is_discarded()) {
        raise(Errc::config_error, "config file " + path.string() + " is not valid JSON");
    }
    return parse_config(document, path.parent_path());
}

nlohmann::json to_json(const PipelineConfig& config) {
    nlohmann::json grid = nlohmann::json::array();
    for (const auto& params : config.forecast.grid) {
        grid.push_back({{"C", params.C}, {"epsilon", params.epsilon}});
    }
    return nlohmann::json{
        {"inputs",
         {{"demand", config.inputs.demand.string()},
          {"indicators", config.inputs.indicators.string()},
          {"plan", config.inputs.plan.string()},
          {"working_days", config.inputs.working_days.string()},
          {"events", config.inputs.events.string()},
          {"datasets", config.inputs.datasets.string()},
          {"embeddings", config.inputs.embeddings.string()},
          {"stopwords", config.inputs.stopwords.string()},
          {"noun_lexicon", config.inputs.noun_lexicon.string()},
          {"mapping_rules", config.inputs.mapping_rules.string()},
          {"feature_specs", config.inputs.feature_specs.string()},
          {"abstraction", config.inputs.abstraction.string()}}},
        {"materials", config.materials},
        {"explain_months", config.explain_months},
        {"region", config.region},
        {"forecast",
         {{"grid", grid},
          {"outer_months", config.forecast.cv.outer_months},
          {"min_train", config.forecast.cv.min_train},
          {"inner_months", config.forecast.cv.inner_months},
          {"iterations", config.forecast.cv.schedule.iterations},
          {"learning_rate", config.forecast.cv.schedule.learning_rate},
          {"q_low", config.forecast.q_low},
          {"q_high", config.forecast.q_high}}},
        {"analyzer",
         {{"n_samples", config.analyzer.n_samples},
          {"sigma", config.analyzer.sigma},
          {"top_k", config.analyzer.top_k},
          {"seed", config.analyzer.seed},
          {"lambda", config.analyzer.lambda}}},
        {"media",
         {{"closeness_days", config.media.closeness_days},
          {"max_events_per_query", config.media.max_events_per_query},
          {"event_pool", config.media.event_pool},
          {"keyword_pool", config.media.keyword_pool},
          {"display_events", config.media.display_events},
          {"display_keywords", config.media.display_keywords}}},
        {"recommender",
         {{"top_n", config.recommender.top_n},
          {"dataset_pool", config.recommender.dataset_pool},
          {"display_datasets", config.recommender.display_datasets},
          {"max_candidates", config.recommender.max_candidates}}},
        {"min_abstraction_level", config.min_abstraction_level},
        {"kg_retention_days", config.kg_retention_days},
        {"seed", config.seed},
        {"parallel", config.parallel},
    };
}

} // namespace xdf::pipeline
