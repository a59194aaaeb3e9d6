#include "stub_sidecar.hpp"

#include <httplib.h>

#include "cohemark/embedder.hpp"

namespace cohemark::testing {

StubSidecar::StubSidecar(StubHandler embed, StubHandler generate) : server_(std::make_unique<httplib::Server>()) {
    const auto route = [this](const std::string& path, StubHandler handler) {
        if (!handler) return;
        server_->Post(path, [this, path, handler](const httplib::Request& req, httplib::Response& res) {
            auto body = nlohmann::json::parse(req.body, nullptr, false);
            {
                std::lock_guard lock(mutex_);
                log_.emplace_back(path, body);
            }
            const auto reply = handler(body);
            res.status = reply.status;
            res.set_content(reply.body, "application/json");
        });
    };
    route("/embed", std::move(embed));
    route("/generate", std::move(generate));
    port_ = server_->bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

StubSidecar::~StubSidecar() {
    server_->stop();
    if (thread_.joinable()) thread_.join();
}

std::string StubSidecar::url() const { return "http://127.0.0.1:" + std::to_string(port_); }

std::vector<nlohmann::json> StubSidecar::requests(const std::string& path) const {
    std::lock_guard lock(mutex_);
    std::vector<nlohmann::json> out;
    for (const auto& [p, body] : log_)
        if (p == path) out.push_back(body);
    return out;
}

StubHandler hash_embed_handler(std::size_t dim) {
    return [dim](const nlohmann::json& req) {
        const HashEmbedder embedder(dim);
        nlohmann::json vectors = nlohmann::json::array();
        for (const auto& t : req.at("texts")) {
            const auto v = embedder.embed_one(t.get<std::string>());
            vectors.push_back(std::vector<double>(v.values().begin(), v.values().end()));
        }
        return StubReply{200, nlohmann::json{{"embeddings", vectors}, {"dimension", dim}, {"model", "stub-hash"}}.dump()};
    };
}

StubHandler fixed_generate_handler(std::string text) {
    return [text](const nlohmann::json&) { return StubReply{200, nlohmann::json{{"text", text}}.dump()}; };
}

}  // namespace cohemark::testing
