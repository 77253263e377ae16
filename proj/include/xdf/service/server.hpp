#pragma once

#include "xdf/explain/builder.hpp"
#include "xdf/kg/graph.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <string>

namespace xdf::service {

/// Immutable snapshot a service instance answers from: the pipeline's
/// explanation records, predictions and graph export.
struct Snapshot {
    std::map<std::string, explain::ForecastExplanation> explanations; // by id
    std::map<std::pair<std::string, std::string>, nlohmann::json> predictions; // (material, month)
    std::vector<std::string> materials; // sorted
    kg::KnowledgeGraph graph;
};

Snapshot load_snapshot(const std::filesystem::path& out_dir);

/**
 * Read-only HTTP facade over a snapshot:
 *   GET /health
 *   GET /materials
 *   GET /forecasts/{material}?month=YYYY-MM
 *   GET /explanations/{id}?profile=planner|expert
 * Unknown resources answer 404, an unknown profile 400. Responses are JSON.
 */
class Server {
public:
    explicit Server(Snapshot snapshot);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and serves on the port (blocking). Throws IoError when the
    /// port is taken.
    void run(const std::string& host, int port);

    /// Binds to a free port and serves on a background thread; returns the
    /// port. Used by tests.
    int start_async(const std::string& host);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace xdf::service
