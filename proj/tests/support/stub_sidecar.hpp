#pragma once

#include <nlohmann/json.hpp>

#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace cohemark::testing {

struct StubReply {
    int status = 200;
    std::string body;
};

using StubHandler = std::function<StubReply(const nlohmann::json& request)>;

// A local HTTP server standing in for the model sidecar. Unset handlers answer 404.
class StubSidecar {
  public:
    StubSidecar(StubHandler embed, StubHandler generate);
    ~StubSidecar();
    StubSidecar(const StubSidecar&) = delete;
    StubSidecar& operator=(const StubSidecar&) = delete;

    [[nodiscard]] std::string url() const;
    [[nodiscard]] std::vector<nlohmann::json> requests(const std::string& path) const;
    [[nodiscard]] std::size_t hits(const std::string& path) const { return requests(path).size(); }

  private:
    std::unique_ptr<httplib::Server> server_;
    int port_ = 0;
    std::thread thread_;
    mutable std::mutex mutex_;
    std::vector<std::pair<std::string, nlohmann::json>> log_;
};

// /embed handler returning hash-embedder vectors of width `dim`.
StubHandler hash_embed_handler(std::size_t dim);
// /generate handler returning `text` for every request.
StubHandler fixed_generate_handler(std::string text);

}  // namespace cohemark::testing
