#pragma once

#include <stdexcept>
#include <string>

namespace xdf {

/// Error codes shared across all modules. Every xdf exception carries one,
/// so callers can branch without string matching.
enum class Errc {
    // knowledge graph
    schema_violation,
    dangling_edge,
    unknown_label,
    unknown_relation,
    unknown_attribute,
    cycle_detected,
    // forecasting
    missing_data,
    degenerate_input,
    insufficient_history,
    empty_residual_pool,
    // analyzer
    non_finite_instance,
    singular_system,
    // media context
    unknown_feature,
    backend_unavailable,
    // recommender
    malformed_header,
    truncated_entry,
    duplicate_token,
    empty_bag,
    no_rankable_candidates,
    empty_input,
    // explanation builder
    unknown_profile,
    duplicate_evidence,
    missing_section,
    // evaluation
    no_annotations,
    empty_entries,
    malformed_annotation_file,
    // general
    config_error,
    io_error,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace xdf
