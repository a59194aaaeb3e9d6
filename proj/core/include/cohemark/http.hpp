#pragma once

#include <chrono>
#include <memory>
#include <semaphore>
#include <string>

namespace cohemark {

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_delay{200};
    double backoff_factor = 2.0;
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// Minimal JSON-over-HTTP client for the sidecar endpoints. Retries network
/// errors, 5xx and 429 per RetryPolicy; other statuses are returned as-is.
/// Throws Error(RemoteUnavailable) once retries are exhausted.
class JsonHttpClient {
  public:
    /// `base_url` is "http://host:port" (optionally with a trailing slash).
    explicit JsonHttpClient(std::string base_url, RetryPolicy retry = {},
                            std::chrono::seconds timeout = std::chrono::seconds(120),
                            int max_in_flight = 4);
    ~JsonHttpClient();

    JsonHttpClient(const JsonHttpClient&) = delete;
    JsonHttpClient& operator=(const JsonHttpClient&) = delete;

    HttpResponse post_json(const std::string& path, const std::string& body) const;

    [[nodiscard]] const std::string& base_url() const noexcept { return base_url_; }

  private:
    std::string base_url_;
    RetryPolicy retry_;
    std::chrono::seconds timeout_;
    std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

}  // namespace cohemark
