#include "xdf/explain/builder.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace xdf::explain {

namespace {

std::string concept_at_depth(const kg::KnowledgeGraph& graph, const std::string& feature_id,
                             int min_level) {
    // a chain shorter than min_level ends at its highest available concept
    auto chain = graph.abstraction_chain(feature_id, min_level);
    return chain.back();
}

} // namespace

UserProfile parse_profile(const std::string& name) {
    if (name == "planner") {
        return UserProfile::planner;
    }
    if (name == "expert") {
        return UserProfile::expert;
    }
    raise(Errc::unknown_profile, "'" + name + "' (expected planner or expert)");
}

std::vector<ConceptHighlight> abstract_concepts(
    std::span<const std::pair<std::string, double>> ranking, const kg::KnowledgeGraph& graph,
    int min_level) {
    struct Partial {
        ConceptHighlight highlight;
        std::size_t best_rank = 0;
        double best_magnitude = 0.0;
    };
    std::map<std::string, Partial> merged;
    std::vector<std::string> order;
    for (std::size_t position = 0; position < ranking.size(); ++position) {
        const auto& [feature_id, weight] = ranking[position];
        const std::string concept_name = concept_at_depth(graph, feature_id, min_level);
        auto it = merged.find(concept_name);
        if (it == merged.end()) {
            Partial partial;
            partial.highlight.concept_name = concept_name;
            partial.highlight.direction = weight < 0 ? -1 : 1;
            partial.highlight.feature_ids = {feature_id};
            partial.highlight.dominant_weight = weight;
            partial.best_rank = position;
            partial.best_magnitude = std::abs(weight);
            merged.emplace(concept_name, std::move(partial));
            order.push_back(concept_name);
        } else {
            it->second.highlight.feature_ids.push_back(feature_id);
            if (std::abs(weight) > it->second.best_magnitude) {
                it->second.best_magnitude = std::abs(weight);
                it->second.highlight.direction = weight < 0 ? -1 : 1;
                it->second.highlight.dominant_weight = weight;
            }
        }
    }
    std::vector<ConceptHighlight> highlights;
    highlights.reserve(order.size());
    for (const auto& concept_name : order) {
        highlights.push_back(std::move(merged.at(concept_name).highlight));
    }
    return highlights;
}

std::optional<ActionableNote> actionable_highlight(
    std::span<const std::pair<std::string, double>> ranking,
    std::span<const forecast::FeatureSpec> specs, const kg::KnowledgeGraph& graph, int min_level) {
    for (const auto& [feature_id, weight] : ranking) {
        auto spec_it = std::find_if(specs.begin(), specs.end(),
                                    [&](const forecast::FeatureSpec& s) { return s.id == feature_id; });
        if (spec_it == specs.end() || !spec_it->actionable) {
            continue;
        }
        ActionableNote note;
        note.concept_name = concept_at_depth(graph, feature_id, min_level);
        note.direction = weight < 0 ? -1 : 1;
        note.feature_id = feature_id;
        return note;
    }
    return std::nullopt;
}

ForecastExplanation assemble(const forecast::Prediction& prediction,
                             std::vector<ConceptHighlight> highlights,
                             std::optional<ActionableNote> actionable,
                             std::vector<EvidenceEvent> events, std::vector<std::string> keywords,
                             recommend::DatasetMetadata dataset,
                             std::vector<std::pair<std::string, double>> ranking,
                             kg::KnowledgeGraph& graph) {
    if (events.size() != 3) {
        raise(Errc::missing_section, "expected 3 events, got " + std::to_string(events.size()));
    }
    if (keywords.size() != 3) {
        raise(Errc::missing_section, "expected 3 keywords, got " + std::to_string(keywords.size()));
    }
    if (dataset.id.empty()) {
        raise(Errc::missing_section, "dataset recommendation missing");
    }
    if (highlights.empty()) {
        raise(Errc::missing_section, "no concept highlights");
    }
    std::set<std::string> event_ids;
    for (const auto& event : events) {
        if (!event_ids.insert(event.id).second) {
            raise(Errc::duplicate_evidence, "event '" + event.id + "' listed twice");
        }
    }
    std::set<std::string> keyword_set(keywords.begin(), keywords.end());
    if (keyword_set.size() != keywords.size()) {
        raise(Errc::duplicate_evidence, "duplicate keyword in explanation");
    }

    ForecastExplanation explanation;
    explanation.id = "EXP-" + prediction.material + "-" + prediction.target.str();
    explanation.material = prediction.material;
    explanation.target = prediction.target;
    explanation.value = prediction.value;
    explanation.lower = prediction.lower;
    explanation.upper = prediction.upper;
    explanation.concepts = std::move(highlights);
    explanation.actionable = std::move(actionable);
    explanation.events = std::move(events);
    explanation.keywords = std::move(keywords);
    explanation.dataset = std::move(dataset);
    explanation.ranking = std::move(ranking);

    const auto [node_id, created] = graph.upsert_node(
        kg::ConceptLabel::ForecastExplanation,
        {{"explanation_id", explanation.id},
         {"material", explanation.material},
         {"month", explanation.target.str()}},
        explanation.target.first_day());
    (void)created;
    const std::string prediction_id =
        kg::node_id_for(kg::ConceptLabel::Prediction, {{"material", prediction.material},
                                                       {"month", prediction.target.str()}});
    graph.add_edge(node_id, prediction_id, kg::Relation::explains);
    for (const auto& event : explanation.events) {
        graph.add_edge(node_id,
                       kg::node_id_for(kg::ConceptLabel::MediaReportedEvent, {{"event_id", event.id}}),
                       kg::Relation::evidencedBy);
    }
    for (const auto& lemma : explanation.keywords) {
        const auto [keyword_id, keyword_created] =
            graph.upsert_node(kg::ConceptLabel::MediaReportedEventKeyword, {{"lemma", lemma}});
        (void)keyword_created;
        graph.add_edge(node_id, keyword_id, kg::Relation::hasKeyword);
    }
    graph.add_edge(node_id,
                   kg::node_id_for(kg::ConceptLabel::ExternalDatasetMetadata,
                                   {{"dataset_id", explanation.dataset.id}}),
                   kg::Relation::recommendsDataset);
    return explanation;
}

nlohmann::json to_json(const ForecastExplanation& explanation) {
    nlohmann::json record{
        {"id", explanation.id},
        {"material", explanation.material},
        {"month", explanation.target.str()},
        {"prediction", {{"value", explanation.value},
                        {"lower", explanation.lower},
                        {"upper", explanation.upper}}},
    };
    record["concepts"] = nlohmann::json::array();
    for (const auto& highlight : explanation.concepts) {
        record["concepts"].push_back({{"concept", highlight.concept_name},
                                      {"direction", highlight.direction > 0 ? "increases" : "decreases"},
                                      {"feature_ids", highlight.feature_ids},
                                      {"dominant_weight", highlight.dominant_weight}});
    }
    if (explanation.actionable) {
        record["actionable"] = {{"concept", explanation.actionable->concept_name},
                                {"direction", explanation.actionable->direction > 0 ? "increases" : "decreases"},
                                {"feature_id", explanation.actionable->feature_id}};
    }
    record["events"] = nlohmann::json::array();
    for (const auto& event : explanation.events) {
        record["events"].push_back({{"id", event.id},
                                    {"date", event.date.str()},
                                    {"title", event.title},
                                    {"source", event.source},
                                    {"feature_id", event.feature_id}});
    }
    record["keywords"] = explanation.keywords;
    record["dataset"] = {{"id", explanation.dataset.id},
                         {"title", explanation.dataset.title},
                         {"publisher", explanation.dataset.publisher},
                         {"uri", explanation.dataset.uri}};
    record["ranking"] = nlohmann::json::array();
    for (const auto& [feature_id, weight] : explanation.ranking) {
        record["ranking"].push_back({{"feature_id", feature_id}, {"weight", weight}});
    }
    return record;
}

ForecastExplanation explanation_from_json(const nlohmann::json& record) {
    ForecastExplanation explanation;
    explanation.id = record.at("id").get<std::string>();
    explanation.material = record.at("material").get<std::string>();
    explanation.target = Month::parse(record.at("month").get<std::string>());
    explanation.value = record.at("prediction").at("value").get<double>();
    explanation.lower = record.at("prediction").at("lower").get<double>();
    explanation.upper = record.at("prediction").at("upper").get<double>();
    for (const auto& entry : record.at("concepts")) {
        ConceptHighlight highlight;
        highlight.concept_name = entry.at("concept").get<std::string>();
        highlight.direction = entry.at("direction").get<std::string>() == "decreases" ? -1 : 1;
        highlight.feature_ids = entry.at("feature_ids").get<std::vector<std::string>>();
        highlight.dominant_weight = entry.value("dominant_weight", 0.0);
        explanation.concepts.push_back(std::move(highlight));
    }
    if (record.contains("actionable")) {
        ActionableNote note;
        note.concept_name = record.at("actionable").at("concept").get<std::string>();
        note.direction = record.at("actionable").at("direction").get<std::string>() == "decreases" ? -1 : 1;
        note.feature_id = record.at("actionable").at("feature_id").get<std::string>();
        explanation.actionable = std::move(note);
    }
    for (const auto& entry : record.at("events")) {
        EvidenceEvent event;
        event.id = entry.at("id").get<std::string>();
        event.date = Date::parse(entry.at("date").get<std::string>());
        event.title = entry.at("title").get<std::string>();
        event.source = entry.value("source", "");
        event.feature_id = entry.value("feature_id", "");
        explanation.events.push_back(std::move(event));
    }
    explanation.keywords = record.at("keywords").get<std::vector<std::string>>();
    explanation.dataset.id = record.at("dataset").at("id").get<std::string>();
    explanation.dataset.title = record.at("dataset").at("title").get<std::string>();
    explanation.dataset.publisher = record.at("dataset").value("publisher", "");
    explanation.dataset.uri = record.at("dataset").value("uri", "");
    for (const auto& entry : record.at("ranking")) {
        explanation.ranking.emplace_back(entry.at("feature_id").get<std::string>(),
                                         entry.at("weight").get<double>());
    }
    return explanation;
}

nlohmann::json redact(const ForecastExplanation& explanation, UserProfile profile) {
    nlohmann::json view{
        {"id", explanation.id},
        {"material", explanation.material},
        {"month", explanation.target.str()},
        {"prediction", {{"value", explanation.value},
                        {"lower", explanation.lower},
                        {"upper", explanation.upper}}},
    };
    view["concepts"] = nlohmann::json::array();
    for (const auto& highlight : explanation.concepts) {
        nlohmann::json entry{{"concept", highlight.concept_name},
                             {"direction", highlight.direction > 0 ? "increases" : "decreases"}};
        if (profile == UserProfile::expert) {
            entry["feature_ids"] = highlight.feature_ids;
        }
        view["concepts"].push_back(std::move(entry));
    }
    if (explanation.actionable) {
        view["actionable"] = {{"concept", explanation.actionable->concept_name},
                              {"direction",
                               explanation.actionable->direction > 0 ? "increases" : "decreases"}};
        if (profile == UserProfile::expert) {
            view["actionable"]["feature_id"] = explanation.actionable->feature_id;
        }
    }
    view["events"] = nlohmann::json::array();
    for (const auto& event : explanation.events) {
        nlohmann::json entry{{"id", event.id}, {"date", event.date.str()}, {"title", event.title}};
        if (!event.source.empty()) {
            entry["source"] = event.source;
        }
        if (profile == UserProfile::expert) {
            entry["feature_id"] = event.feature_id;
        }
        view["events"].push_back(std::move(entry));
    }
    if (profile == UserProfile::expert) {
        view["keywords"] = explanation.keywords;
        view["dataset"] = {{"id", explanation.dataset.id},
                           {"title", explanation.dataset.title},
                           {"publisher", explanation.dataset.publisher},
                           {"uri", explanation.dataset.uri}};
        view["ranking"] = nlohmann::json::array();
        for (const auto& [feature_id, weight] : explanation.ranking) {
            view["ranking"].push_back({{"feature_id", feature_id}, {"weight", weight}});
        }
    }
    return view;
}

std::string render_text(const nlohmann::json& view) {
    std::ostringstream out;
    out << "Forecast " << view.at("material").get<std::string>() << " "
        << view.at("month").get<std::string>() << "\n";
    const auto& prediction = view.at("prediction");
    out << "  demand " << prediction.at("value").get<double>() << " (interval "
        << prediction.at("lower").get<double>() << " .. " << prediction.at("upper").get<double>()
        << ")\n";
    out << "  main factors:\n";
    for (const auto& entry : view.at("concepts")) {
        out << "    - " << entry.at("concept").get<std::string>() << " ("
            << entry.at("direction").get<std::string>() << " the forecast)\n";
    }
    if (view.contains("actionable")) {
        out << "  actionable: " << view.at("actionable").at("concept").get<std::string>() << " ("
            << view.at("actionable").at("direction").get<std::string>() << ")\n";
    }
    out << "  related media events:\n";
    for (const auto& entry : view.at("events")) {
        out << "    - [" << entry.at("date").get<std::string>() << "] "
            << entry.at("title").get<std::string>() << "\n";
    }
    if (view.contains("keywords")) {
        out << "  keywords:";
        for (const auto& keyword : view.at("keywords")) {
            out << " " << keyword.get<std::string>();
        }
        out << "\n";
    }
    if (view.contains("dataset")) {
        out << "  suggested dataset: " << view.at("dataset").at("title").get<std::string>() << " ("
            << view.at("dataset").at("uri").get<std::string>() << ")\n";
    }
    return out.str();
}

} // namespace xdf::explain
