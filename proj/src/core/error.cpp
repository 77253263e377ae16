#include "xdf/core/error.hpp"

namespace xdf {

const char* to_string(Errc code) {
    switch (code) {
        case Errc::schema_violation: return "SchemaViolation";
        case Errc::dangling_edge: return "DanglingEdge";
        case Errc::unknown_label: return "UnknownLabel";
        case Errc::unknown_relation: return "UnknownRelation";
        case Errc::unknown_attribute: return "UnknownAttribute";
        case Errc::cycle_detected: return "CycleDetected";
        case Errc::missing_data: return "MissingData";
        case Errc::degenerate_input: return "DegenerateInput";
        case Errc::insufficient_history: return "InsufficientHistory";
        case Errc::empty_residual_pool: return "EmptyResidualPool";
        case Errc::non_finite_instance: return "NonFiniteInstance";
        case Errc::singular_system: return "SingularSystem";
        case Errc::unknown_feature: return "UnknownFeature";
        case Errc::backend_unavailable: return "BackendUnavailable";
        case Errc::malformed_header: return "MalformedHeader";
        case Errc::truncated_entry: return "TruncatedEntry";
        case Errc::duplicate_token: return "DuplicateToken";
        case Errc::empty_bag: return "EmptyBag";
        case Errc::no_rankable_candidates: return "NoRankableCandidates";
        case Errc::empty_input: return "EmptyInput";
        case Errc::unknown_profile: return "UnknownProfile";
        case Errc::duplicate_evidence: return "DuplicateEvidence";
        case Errc::missing_section: return "MissingSection";
        case Errc::no_annotations: return "NoAnnotations";
        case Errc::empty_entries: return "EmptyEntries";
        case Errc::malformed_annotation_file: return "MalformedAnnotationFile";
        case Errc::config_error: return "ConfigError";
        case Errc::io_error: return "IoError";
    }
    return "UnknownError";
}

} // namespace xdf
