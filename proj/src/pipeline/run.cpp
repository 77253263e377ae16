#include "xdf/pipeline/run.hpp"

#include "xdf/core/rng.hpp"
#include "xdf/core/text.hpp"
#include "xdf/kg/mapping.hpp"
#include "xdf/media/keywords.hpp"
#include "xdf/recommend/embedding.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace xdf::pipeline {

namespace {

struct LoadedInputs {
    std::map<std::string, forecast::DemandSeries> demand;
    std::vector<forecast::IndicatorSeries> indicators;
    std::map<std::string, forecast::MonthlySeries> plan;
    forecast::WorkingDaySeries working_days;
    std::vector<forecast::FeatureSpec> specs;
    nlohmann::json abstraction;
    media::FixtureEventBackend events{std::vector<media::MediaEvent>{}};
    recommend::FixtureDatasetBackend datasets{std::vector<recommend::DatasetMetadata>{}};
    recommend::EmbeddingTable embeddings;
    std::unordered_set<std::string> stopwords;
    std::unordered_set<std::string> noun_lexicon;
    std::vector<kg::MappingRule> rules;
};

LoadedInputs load_inputs(const PipelineConfig& config) {
    LoadedInputs in;
    in.demand = forecast::load_demand(config.inputs.demand);
    in.indicators = forecast::load_indicators(config.inputs.indicators);
    in.plan = forecast::load_plan(config.inputs.plan);
    in.working_days = forecast::load_working_days(config.inputs.working_days);
    in.specs = forecast::load_feature_specs(config.inputs.feature_specs);
    in.abstraction = nlohmann::json::parse(read_file(config.inputs.abstraction));
    in.events = media::FixtureEventBackend::from_jsonl(config.inputs.events);
    in.datasets = recommend::FixtureDatasetBackend::from_jsonl(config.inputs.datasets);
    in.embeddings = recommend::load_embeddings(config.inputs.embeddings);
    in.stopwords = load_token_set(config.inputs.stopwords);
    in.noun_lexicon = load_token_set(config.inputs.noun_lexicon);
    in.rules = kg::load_mapping_rules(config.inputs.mapping_rules);
    return in;
}

const forecast::MonthlySeries* indicator_series(const LoadedInputs& in, const std::string& indicator,
                                                const std::string& region) {
    for (const auto& series : in.indicators) {
        if (series.indicator == indicator && series.region == region) {
            return &series.values;
        }
    }
    return nullptr;
}

std::vector<kg::FlatRecord> make_records(const LoadedInputs& in) {
    std::vector<kg::FlatRecord> records;
    for (const auto& [material, series] : in.demand) {
        for (const auto& [month, quantity] : series.quantities.points) {
            kg::FlatRecord record;
            record.source = "demand";
            record.fields = {{"material", material},
                             {"month", month.str()},
                             {"quantity", std::to_string(quantity)}};
            records.push_back(std::move(record));
        }
    }
    for (const auto& entry : in.abstraction.at("concepts")) {
        kg::FlatRecord record;
        record.source = "abstraction";
        const auto name = entry.at("name").get<std::string>();
        record.fields["name"] = name;
        record.fields["long_name"] = entry.value("long_name", name);
        record.fields["has_parent"] = entry.contains("parent") ? "yes" : "no";
        if (entry.contains("parent")) {
            record.fields["parent"] = entry.at("parent").get<std::string>();
        }
        records.push_back(std::move(record));
    }
    for (const auto& spec : in.specs) {
        kg::FlatRecord record;
        record.source = "feature_map";
        record.fields = {{"feature_id", spec.id},
                         {"leaf", spec.abstraction_leaf},
                         {"actionable", spec.actionable ? "yes" : "no"}};
        records.push_back(std::move(record));
    }
    for (const auto& event : in.events.events()) {
        kg::FlatRecord record;
        record.source = "event";
        record.fields = {{"event_id", event.id},
                         {"date", event.date.str()},
                         {"title", event.title},
                         {"body", event.body},
                         {"source_name", event.source.empty() ? "unknown" : event.source}};
        records.push_back(std::move(record));
    }
    for (const auto& dataset : in.datasets.entries()) {
        kg::FlatRecord record;
        record.source = "dataset";
        record.fields = {{"dataset_id", dataset.id},
                         {"title", dataset.title},
                         {"description", dataset.description},
                         {"publisher", dataset.publisher},
                         {"uri", dataset.uri},
                         {"source_name", dataset.publisher.empty() ? "open-data" : dataset.publisher}};
        records.push_back(std::move(record));
    }
    return records;
}

struct PairOutcome {
    std::string material;
    Month target;
    bool ok = false;
    std::string fail_reason;
    forecast::Prediction prediction;
    forecast::FeatureVector instance;
    std::vector<std::pair<std::string, double>> ranked_top; // analyzer selection
    std::vector<std::pair<std::string, double>> ranked_all;
    std::vector<explain::EvidenceEvent> events;
    std::vector<std::string> keywords;
    recommend::DatasetMetadata dataset;
    forecast::SvrParams selected;
    Month last_training_month;
    std::size_t events_retrieved = 0;
    std::size_t queries_issued = 0;
};

struct MaterialPlan {
    std::string material;
    std::vector<forecast::DataRow> rows;
    std::vector<forecast::FeatureVector> row_vectors;
};

PairOutcome explain_pair(const PipelineConfig& config, const LoadedInputs& in,
                         const MaterialPlan& plan, const std::vector<forecast::CvFold>& folds,
                         std::size_t fold_index, ExecPolicy policy) {
    PairOutcome out;
    out.material = plan.material;
    const auto& fold = folds[fold_index];
    out.target = fold.month;
    out.selected = fold.selected;
    out.last_training_month = fold.last_training_month;

    // rows strictly before the target month
    std::size_t train_count = 0;
    while (train_count < plan.rows.size() && plan.rows[train_count].month < fold.month) {
        ++train_count;
    }
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (std::size_t i = 0; i < train_count; ++i) {
        X.push_back(plan.rows[i].x);
        y.push_back(plan.rows[i].y);
    }
    forecast::ForecastModel model =
        forecast::train_svr(X, y, fold.selected, config.forecast.cv.schedule);

    std::vector<double> residual_pool;
    for (std::size_t i = 0; i < fold_index; ++i) {
        if (folds[i].month < fold.month) {
            residual_pool.push_back(folds[i].residual);
        }
    }
    if (residual_pool.empty()) {
        out.fail_reason = "no earlier folds to build a residual pool";
        return out;
    }
    out.instance = plan.row_vectors[plan.rows.size() - folds.size() + fold_index];
    if (out.instance.target != fold.month) {
        raise(Errc::config_error, "fold and feature vector disagree on the target month");
    }
    out.prediction = forecast::predict_with_uncertainty(model, out.instance, residual_pool,
                                                        config.forecast.q_low, config.forecast.q_high);

    // local surrogate in standardized feature space
    std::vector<std::string> feature_ids;
    for (const auto& spec : in.specs) {
        feature_ids.push_back(spec.id);
    }
    const auto instance_std = forecast::apply_scaling(model.scaling(), out.instance.numeric());
    analyzer::AnalyzerConfig analyzer_config = config.analyzer;
    analyzer_config.seed =
        derive_seed(config.seed, {fnv1a(plan.material), static_cast<std::uint64_t>(out.target.index()),
                                  fnv1a("analyzer"), config.analyzer.seed});
    const auto& scaling = model.scaling();
    analyzer::BlackBox box = [&](std::span<const double> z) {
        std::vector<double> raw(z.size());
        for (std::size_t f = 0; f < z.size(); ++f) {
            raw[f] = z[f] * scaling.scale[f] + scaling.mean[f];
        }
        return model.predict(raw);
    };
    const auto surrogate =
        analyzer::analyze(box, instance_std, feature_ids, analyzer_config, policy);
    out.ranked_all = analyzer::rank_features(surrogate);
    for (const auto& feature_id : surrogate.ranking) {
        for (const auto& [id, weight] : out.ranked_all) {
            if (id == feature_id) {
                out.ranked_top.emplace_back(id, weight);
                break;
            }
        }
    }

    // temporally-aligned media events for the top-ranked features
    const auto queries =
        media::build_queries(out.ranked_top, in.specs, out.instance, config.media.closeness_days);
    out.queries_issued = queries.size();
    std::map<std::string, std::pair<media::MediaEvent, std::string>> by_id;
    for (const auto& query : queries) {
        for (const auto& event :
             media::retrieve_events(query, in.events, config.media.max_events_per_query)) {
            by_id.emplace(event.id, std::make_pair(event, query.feature_id));
        }
    }
    out.events_retrieved = by_id.size();
    std::vector<std::pair<media::MediaEvent, std::string>> pool;
    pool.reserve(by_id.size());
    for (const auto& [id, entry] : by_id) {
        pool.push_back(entry);
    }
    std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
        return std::tie(a.first.date, a.first.id) < std::tie(b.first.date, b.first.id);
    });
    if (pool.size() < config.media.display_events) {
        out.fail_reason = "only " + std::to_string(pool.size()) + " media events matched";
        return out;
    }
    const auto event_indices = recommend::diversity_sample_indices(
        pool.size(), config.media.event_pool, config.media.display_events,
        derive_seed(config.seed, {fnv1a(plan.material), static_cast<std::uint64_t>(out.target.index()),
                                  fnv1a("events")}));
    for (std::size_t index : event_indices) {
        const auto& [event, feature_id] = pool[index];
        explain::EvidenceEvent evidence;
        evidence.id = event.id;
        evidence.date = event.date;
        evidence.title = event.title;
        evidence.source = event.source;
        evidence.feature_id = feature_id;
        out.events.push_back(std::move(evidence));
    }

    // keyword extraction over everything retrieved for this pair
    std::vector<media::MediaEvent> retrieved;
    retrieved.reserve(pool.size());
    for (const auto& [event, feature_id] : pool) {
        (void)feature_id;
        retrieved.push_back(event);
    }
    const auto keyword_stats = media::extract_keywords(retrieved, in.stopwords, in.noun_lexicon);
    if (keyword_stats.size() < config.media.display_keywords) {
        out.fail_reason = "only " + std::to_string(keyword_stats.size()) + " keywords extracted";
        return out;
    }
    const auto keyword_indices = recommend::diversity_sample_indices(
        keyword_stats.size(), config.media.keyword_pool, config.media.display_keywords,
        derive_seed(config.seed, {fnv1a(plan.material), static_cast<std::uint64_t>(out.target.index()),
                                  fnv1a("keywords")}));
    for (std::size_t index : keyword_indices) {
        out.keywords.push_back(keyword_stats[index].lemma);
    }

    // dataset retrieval: the portal query carries the ranked features'
    // keyword phrases plus the keywords extracted from the media events
    std::vector<std::string> portal_keywords;
    for (const auto& [feature_id, weight] : out.ranked_top) {
        (void)weight;
        for (const auto& spec : in.specs) {
            if (spec.id == feature_id) {
                portal_keywords.insert(portal_keywords.end(), spec.mers_keywords.begin(),
                                       spec.mers_keywords.end());
            }
        }
    }
    for (const auto& stat : keyword_stats) {
        portal_keywords.push_back(stat.lemma);
    }
    const auto candidates = in.datasets.query(portal_keywords, config.recommender.max_candidates);
    if (candidates.empty()) {
        out.fail_reason = "no dataset metadata matched the portal query";
        return out;
    }

    // query bag = the same keywords as a normalized bag of words
    std::map<std::string, double> counts;
    for (const auto& phrase : portal_keywords) {
        for (const auto& token : tokenize_alpha(phrase)) {
            if (in.stopwords.count(token) == 0) {
                counts[token] += 1.0;
            }
        }
    }
    recommend::DocumentBag query_bag;
    try {
        query_bag = recommend::bag_from_counts(counts, in.embeddings);
    } catch (const Error& e) {
        out.fail_reason = e.what();
        return out;
    }
    recommend::RankOptions options;
    options.top_n = config.recommender.top_n;
    options.policy = policy;
    std::vector<recommend::RankedDataset> ranked_datasets;
    try {
        ranked_datasets =
            recommend::rank_datasets(query_bag, candidates, in.embeddings, in.stopwords, options);
    } catch (const Error& e) {
        out.fail_reason = e.what();
        return out;
    }
    const auto dataset_indices = recommend::diversity_sample_indices(
        ranked_datasets.size(), config.recommender.dataset_pool, config.recommender.display_datasets,
        derive_seed(config.seed, {fnv1a(plan.material), static_cast<std::uint64_t>(out.target.index()),
                                  fnv1a("datasets")}));
    const auto& chosen = ranked_datasets[dataset_indices.front()];
    for (const auto& dataset : candidates) {
        if (dataset.id == chosen.id) {
            out.dataset = dataset;
            break;
        }
    }
    out.ok = true;
    return out;
}

void persist_prediction(kg::KnowledgeGraph& graph, const PairOutcome& outcome,
                        std::span<const forecast::FeatureSpec> specs) {
    const std::string model_name = "svr-" + outcome.material;
    const auto [model_id, model_created] = graph.upsert_node(
        kg::ConceptLabel::RegressionModel,
        {{"name", model_name}, {"algorithm", "linear-epsilon-svr"}});
    (void)model_created;
    const auto [fv_id, fv_created] = graph.upsert_node(
        kg::ConceptLabel::FeatureVector,
        {{"material", outcome.material}, {"month", outcome.target.str()}},
        outcome.target.first_day());
    (void)fv_created;
    const std::string product_id =
        kg::node_id_for(kg::ConceptLabel::Product, {{"material", outcome.material}});
    graph.add_edge(product_id, fv_id, kg::Relation::describedBy);
    for (const auto& spec : specs) {
        graph.add_edge(fv_id, kg::node_id_for(kg::ConceptLabel::Attribute, {{"feature_id", spec.id}}),
                       kg::Relation::hasAttribute);
    }
    const auto [prediction_id, prediction_created] = graph.upsert_node(
        kg::ConceptLabel::Prediction,
        {{"material", outcome.material},
         {"month", outcome.target.str()},
         {"value", outcome.prediction.value},
         {"lower", outcome.prediction.lower},
         {"upper", outcome.prediction.upper}},
        outcome.target.first_day());
    (void)prediction_created;
    graph.add_edge(prediction_id, model_id, kg::Relation::predictedBy);
    graph.add_edge(prediction_id, fv_id, kg::Relation::describedBy);
}

} // namespace

kg::IngestionSummary ingest(const PipelineConfig& config, kg::KnowledgeGraph& graph) {
    const LoadedInputs in = load_inputs(config);
    const auto records = make_records(in);
    return kg::apply_mapping(graph, records, in.rules);
}

RunResult run_pipeline(const PipelineConfig& config) {
    const LoadedInputs in = load_inputs(config);
    const ExecPolicy policy = config.parallel ? ExecPolicy::parallel : ExecPolicy::serial;

    RunResult result;
    const auto records = make_records(in);
    const auto summary = kg::apply_mapping(result.graph, records, in.rules);

    // instance data beyond the retention window expires before any new work
    Date now;
    for (const auto& [material, series] : in.demand) {
        if (!series.quantities.empty()) {
            now = std::max(now, series.quantities.last_month().mid_day());
        }
    }
    const std::size_t pruned = result.graph.prune_window(now, config.kg_retention_days);

    std::vector<std::string> materials = config.materials;
    if (materials.empty()) {
        for (const auto& [material, series] : in.demand) {
            materials.push_back(material);
        }
    }
    std::sort(materials.begin(), materials.end());

    // per-material feature rows (pure computation, parallel across materials)
    std::vector<MaterialPlan> plans(materials.size());
    std::vector<std::string> plan_errors(materials.size());
    for_each_index(materials.size(), policy, [&](std::size_t m) {
        const auto& material = materials[m];
        auto demand_it = in.demand.find(material);
        if (demand_it == in.demand.end()) {
            plan_errors[m] = "material '" + material + "' missing from the demand file";
            return;
        }
        forecast::SeriesBundle bundle;
        bundle.demand = &demand_it->second;
        auto plan_it = in.plan.find(material);
        bundle.plan = plan_it == in.plan.end() ? nullptr : &plan_it->second;
        bundle.working_days = &in.working_days;
        bundle.gdp = indicator_series(in, "GDP", config.region);
        bundle.pmi = indicator_series(in, "PMI", config.region);
        bundle.ue = indicator_series(in, "UE", config.region);

        MaterialPlan plan;
        plan.material = material;
        const auto& quantities = demand_it->second.quantities;
        for (const auto& [month, quantity] : quantities.points) {
            try {
                auto fv = forecast::build_feature_vector(bundle, month, in.specs);
                forecast::DataRow row;
                row.month = month;
                row.x = fv.numeric();
                row.y = quantity;
                plan.rows.push_back(std::move(row));
                plan.row_vectors.push_back(std::move(fv));
            } catch (const Error& e) {
                if (e.code() != Errc::missing_data) {
                    throw;
                }
            }
        }
        plans[m] = std::move(plan);
    });

    // explanation pipeline per (material, explained month)
    struct PairTask {
        std::size_t plan_index;
        std::vector<forecast::CvFold> folds;
        std::size_t fold_index;
    };
    std::vector<PairTask> tasks;
    for (std::size_t m = 0; m < plans.size(); ++m) {
        const auto& plan = plans[m];
        if (!plan_errors[m].empty()) {
            result.skipped.push_back({materials[m], Month{}, plan_errors[m]});
            continue;
        }
        std::vector<forecast::CvFold> folds;
        try {
            folds = forecast::nested_cv(plan.rows, config.forecast.grid, config.forecast.cv);
        } catch (const Error& e) {
            result.skipped.push_back({plan.material, Month{}, e.what()});
            continue;
        }
        const std::size_t n_explained =
            std::min<std::size_t>(static_cast<std::size_t>(config.explain_months), folds.size());
        for (std::size_t k = folds.size() - n_explained; k < folds.size(); ++k) {
            tasks.push_back({m, folds, k});
        }
    }
    std::vector<PairOutcome> outcomes(tasks.size());
    for_each_index(tasks.size(), policy, [&](std::size_t t) {
        const auto& plan = plans[tasks[t].plan_index];
        try {
            outcomes[t] =
                explain_pair(config, in, plan, tasks[t].folds, tasks[t].fold_index, ExecPolicy::serial);
        } catch (const Error& e) {
            outcomes[t].material = plan.material;
            outcomes[t].target = tasks[t].folds[tasks[t].fold_index].month;
            outcomes[t].ok = false;
            outcomes[t].fail_reason = e.what();
        }
    });

    // persistence is single-writer, in (material, month) order
    std::size_t events_retrieved = 0;
    std::size_t queries_issued = 0;
    for (auto& outcome : outcomes) {
        events_retrieved += outcome.events_retrieved;
        queries_issued += outcome.queries_issued;
        if (!outcome.ok) {
            result.skipped.push_back({outcome.material, outcome.target, outcome.fail_reason});
            continue;
        }
        persist_prediction(result.graph, outcome, in.specs);
        auto highlights =
            explain::abstract_concepts(outcome.ranked_top, result.graph, config.min_abstraction_level);
        auto actionable = explain::actionable_highlight(outcome.ranked_top, in.specs, result.graph,
                                                        config.min_abstraction_level);
        auto explanation = explain::assemble(outcome.prediction, std::move(highlights),
                                             std::move(actionable), outcome.events, outcome.keywords,
                                             outcome.dataset, outcome.ranked_all, result.graph);
        result.explanations.push_back(std::move(explanation));
        result.predictions.push_back(outcome.prediction);
        result.instances.push_back(outcome.instance);
        result.fold_training_bounds.push_back(outcome.last_training_month);
    }
    result.graph.check_invariants();

    const auto config_json = to_json(config);
    nlohmann::json skipped = nlohmann::json::array();
    for (const auto& pair : result.skipped) {
        skipped.push_back({{"material", pair.material},
                           {"month", pair.target == Month{} ? "" : pair.target.str()},
                           {"reason", pair.reason}});
    }
    result.manifest = nlohmann::json{
        {"version", kVersion},
        {"config_hash", fnv1a(config_json.dump())},
        {"counts",
         {{"nodes_created", summary.nodes_created},
          {"edges_created", summary.edges_created},
          {"records_skipped", summary.records_skipped},
          {"nodes_pruned", pruned},
          {"materials", materials.size()},
          {"explanations", result.explanations.size()},
          {"queries_issued", queries_issued},
          {"events_retrieved", events_retrieved}}},
        {"skipped", skipped},
    };
    return result;
}

RunResult run_pipeline_to(const PipelineConfig& config, const std::filesystem::path& out_dir) {
    RunResult result = run_pipeline(config);
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream out(out_dir / "explanations.jsonl", std::ios::binary);
        for (const auto& explanation : result.explanations) {
            out << explain::to_json(explanation).dump() << '\n';
        }
    }
    {
        std::ofstream out(out_dir / "predictions.jsonl", std::ios::binary);
        for (const auto& prediction : result.predictions) {
            out << nlohmann::json{{"material", prediction.material},
                                  {"month", prediction.target.str()},
                                  {"value", prediction.value},
                                  {"lower", prediction.lower},
                                  {"upper", prediction.upper}}
                       .dump()
                << '\n';
        }
    }
    {
        std::ofstream out(out_dir / "kg_snapshot.jsonl", std::ios::binary);
        result.graph.export_jsonl(out);
    }
    write_file(out_dir / "manifest.json", result.manifest.dump(2) + "\n");
    return result;
}

} // namespace xdf::pipeline
