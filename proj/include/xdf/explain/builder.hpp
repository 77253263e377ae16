#pragma once

#include "xdf/forecast/features.hpp"
#include "xdf/forecast/uncertainty.hpp"
#include "xdf/kg/graph.hpp"
#include "xdf/media/events.hpp"
#include "xdf/recommend/rank.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace xdf::explain {

/// A ranked feature lifted to its abstraction concept. Raw feature ids stay
/// inside `feature_ids` and are only ever rendered for the expert profile.
struct ConceptHighlight {
    std::string concept_name;
    int direction = 1; // +1 increases the forecast, -1 decreases it
    std::vector<std::string> feature_ids;
    double dominant_weight = 0.0;
};

struct ActionableNote {
    std::string concept_name;
    int direction = 1;
    std::string feature_id; // expert drill-down only
};

struct EvidenceEvent {
    std::string id;
    Date date;
    std::string title;
    std::string source;
    std::string feature_id; // the ranked feature whose query returned it
};

struct ForecastExplanation {
    std::string id;
    std::string material;
    Month target;
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    std::vector<ConceptHighlight> concepts;
    std::optional<ActionableNote> actionable;
    std::vector<EvidenceEvent> events;   // exactly 3, distinct ids
    std::vector<std::string> keywords;   // exactly 3, distinct lemmas
    recommend::DatasetMetadata dataset;  // exactly 1
    std::vector<std::pair<std::string, double>> ranking; // expert drill-down
};

enum class UserProfile { planner, expert };
UserProfile parse_profile(const std::string& name); // throws UnknownProfile

/// Replaces each ranked feature by its abstraction at depth >= min_level;
/// features sharing a concept merge into one highlight whose sign comes from
/// the largest-magnitude contributor, ordered by best underlying rank.
/// Throws UnknownAttribute when a feature has no abstraction in the graph.
std::vector<ConceptHighlight> abstract_concepts(
    std::span<const std::pair<std::string, double>> ranking, const kg::KnowledgeGraph& graph,
    int min_level);

/// The highest-ranked actionable feature expressed through its abstraction
/// concept; absent when no ranked feature is actionable.
std::optional<ActionableNote> actionable_highlight(
    std::span<const std::pair<std::string, double>> ranking,
    std::span<const forecast::FeatureSpec> specs, const kg::KnowledgeGraph& graph, int min_level);

/// Builds the explanation record and persists it: one ForecastExplanation
/// node plus explains, evidencedBy x3, hasKeyword x3 and recommendsDataset
/// edges. The prediction and evidence nodes must already exist. Throws
/// MissingSection on wrong counts and DuplicateEvidence on repeated ids.
ForecastExplanation assemble(const forecast::Prediction& prediction,
                             std::vector<ConceptHighlight> highlights,
                             std::optional<ActionableNote> actionable,
                             std::vector<EvidenceEvent> events, std::vector<std::string> keywords,
                             recommend::DatasetMetadata dataset,
                             std::vector<std::pair<std::string, double>> ranking,
                             kg::KnowledgeGraph& graph);

/// Full record as stored in the explanation output file.
nlohmann::json to_json(const ForecastExplanation& explanation);
ForecastExplanation explanation_from_json(const nlohmann::json& record);

/// Profile-redacted view. Planner: prediction + interval, concept
/// highlights, actionable note and events, with no feature ids, keywords or
/// dataset. Expert: everything, including the per-feature drill-down.
nlohmann::json redact(const ForecastExplanation& explanation, UserProfile profile);

/// Plain-text rendering of a redacted view.
std::string render_text(const nlohmann::json& view);

} // namespace xdf::explain
