#include "xdf/service/server.hpp"

#include "xdf/core/text.hpp"

#include "httplib.h"

#include <fstream>
#include <set>
#include <thread>

namespace xdf::service {

Snapshot load_snapshot(const std::filesystem::path& out_dir) {
    Snapshot snapshot;
    {
        std::ifstream in(out_dir / "explanations.jsonl");
        if (!in) {
            raise(Errc::io_error, "no explanations.jsonl under " + out_dir.string());
        }
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) {
                continue;
            }
            auto explanation = explain::explanation_from_json(nlohmann::json::parse(line));
            snapshot.explanations.emplace(explanation.id, std::move(explanation));
        }
    }
    {
        std::ifstream in(out_dir / "predictions.jsonl");
        if (!in) {
            raise(Errc::io_error, "no predictions.jsonl under " + out_dir.string());
        }
        std::string line;
        std::set<std::string> materials;
        while (std::getline(in, line)) {
            if (line.empty()) {
                continue;
            }
            auto record = nlohmann::json::parse(line);
            const auto material = record.at("material").get<std::string>();
            const auto month = record.at("month").get<std::string>();
            materials.insert(material);
            snapshot.predictions.emplace(std::make_pair(material, month), std::move(record));
        }
        snapshot.materials.assign(materials.begin(), materials.end());
    }
    {
        std::ifstream in(out_dir / "kg_snapshot.jsonl");
        if (in) {
            snapshot.graph.import_jsonl(in);
        }
    }
    return snapshot;
}

struct Server::Impl {
    Snapshot snapshot;
    httplib::Server http;
    std::thread worker;

    explicit Impl(Snapshot snap) : snapshot(std::move(snap)) {
        http.Get("/health", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(nlohmann::json{{"status", "ok"}}.dump(), "application/json");
        });
        http.Get("/materials", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(nlohmann::json(snapshot.materials).dump(), "application/json");
        });
        http.Get(R"(/forecasts/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            const std::string material = req.matches[1];
            if (!req.has_param("month")) {
                res.status = 400;
                res.set_content(nlohmann::json{{"error", "month parameter required"}}.dump(),
                                "application/json");
                return;
            }
            auto it = snapshot.predictions.find({material, req.get_param_value("month")});
            if (it == snapshot.predictions.end()) {
                res.status = 404;
                res.set_content(nlohmann::json{{"error", "no forecast for this material/month"}}.dump(),
                                "application/json");
                return;
            }
            res.set_content(it->second.dump(), "application/json");
        });
        http.Get(R"(/explanations/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            auto it = snapshot.explanations.find(id);
            if (it == snapshot.explanations.end()) {
                res.status = 404;
                res.set_content(nlohmann::json{{"error", "unknown explanation id"}}.dump(),
                                "application/json");
                return;
            }
            explain::UserProfile profile = explain::UserProfile::planner; // restrictive default
            if (req.has_param("profile")) {
                try {
                    profile = explain::parse_profile(req.get_param_value("profile"));
                } catch (const Error&) {
                    res.status = 400;
                    res.set_content(nlohmann::json{{"error", "profile must be planner or expert"}}.dump(),
                                    "application/json");
                    return;
                }
            }
            res.set_content(explain::redact(it->second, profile).dump(), "application/json");
        });
    }
};

Server::Server(Snapshot snapshot) : impl_(std::make_unique<Impl>(std::move(snapshot))) {}

Server::~Server() {
    stop();
}

void Server::run(const std::string& host, int port) {
    if (!impl_->http.listen(host, port)) {
        raise(Errc::io_error, "cannot listen on " + host + ":" + std::to_string(port));
    }
}

int Server::start_async(const std::string& host) {
    const int port = impl_->http.bind_to_any_port(host);
    if (port <= 0) {
        raise(Errc::io_error, "cannot bind to a free port on " + host);
    }
    impl_->worker = std::thread([this] { impl_->http.listen_after_bind(); });
    impl_->http.wait_until_ready();
    return port;
}

void Server::stop() {
    if (impl_ && impl_->http.is_running()) {
        impl_->http.stop();
    }
    if (impl_ && impl_->worker.joinable()) {
        impl_->worker.join();
    }
}

} // namespace xdf::service
