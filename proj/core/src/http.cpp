#include "cohemark/http.hpp"

#include <httplib.h>

#include <algorithm>
#include <thread>

#include "cohemark/error.hpp"

namespace cohemark {

JsonHttpClient::JsonHttpClient(std::string base_url, RetryPolicy retry, std::chrono::seconds timeout,
                               int max_in_flight)
    : base_url_(std::move(base_url)),
      retry_(retry),
      timeout_(timeout),
      in_flight_(std::make_unique<std::counting_semaphore<>>(std::max(1, max_in_flight))) {
    while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
    if (base_url_.empty()) {
        throw Error(Errc::InvalidArgument, "remote endpoint URL is empty");
    }
}

JsonHttpClient::~JsonHttpClient() = default;

HttpResponse JsonHttpClient::post_json(const std::string& path, const std::string& body) const {
    in_flight_->acquire();
    struct Release {
        std::counting_semaphore<>* s;
        ~Release() { s->release(); }
    } release{in_flight_.get()};

    auto delay = retry_.initial_delay;
    std::string last_error;
    for (int attempt = 1; attempt <= std::max(1, retry_.max_attempts); ++attempt) {
        // httplib clients are not thread-safe; one per request keeps concurrent callers independent.
        httplib::Client client(base_url_);
        client.set_connection_timeout(std::chrono::seconds(5));
        client.set_read_timeout(timeout_);
        client.set_write_timeout(timeout_);
        auto res = client.Post(path, body, "application/json");
        bool retryable = false;
        if (!res) {
            last_error = "request to " + base_url_ + path + " failed: " + httplib::to_string(res.error());
            retryable = true;
        } else if (res->status >= 500 || res->status == 429) {
            last_error = "request to " + base_url_ + path + " returned HTTP " + std::to_string(res->status);
            retryable = true;
        } else {
            return HttpResponse{res->status, res->body};
        }
        if (!retryable || attempt >= retry_.max_attempts) break;
        std::this_thread::sleep_for(delay);
        delay = std::chrono::duration_cast<std::chrono::milliseconds>(delay * retry_.backoff_factor);
    }
    throw Error(Errc::RemoteUnavailable, last_error);
}

}  // namespace cohemark
