#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "epilog/backends.hpp"

namespace epilog {

struct HttpBackendConfig {
    std::string base_url = "http://127.0.0.1:8080";
    std::string path = "/v1/chat/completions";
    std::string model = "default";
    std::string api_key_env;  // name of the env var holding the bearer token
    int timeout_ms = 30000;
    int max_retries = 2;
    int max_in_flight = 4;
    std::string id = "http";
};

struct RequestRecord {
    int status = 0;  // 0 = transport failure
    double latency_ms = 0.0;
    bool ok = false;
    std::string error;
};

// Client for chat-completions-compatible services. Sends the prompt as a
// single user message; reads choices[0].message.content. Retries 429/5xx
// and transport failures up to max_retries, honoring Retry-After. At most
// max_in_flight requests run concurrently.
class HttpBackend final : public CompletionBackend {
public:
    explicit HttpBackend(HttpBackendConfig config);
    ~HttpBackend() override;

    std::string backend_id() const override { return config_.id; }
    std::string complete(const CompletionRequest& request) override;

    // Audit trail of every attempt, in completion order.
    std::vector<RequestRecord> request_log() const;

private:
    struct Impl;
    HttpBackendConfig config_;
    std::unique_ptr<Impl> impl_;
    mutable std::mutex log_mutex_;
    std::vector<RequestRecord> log_;

    void record(RequestRecord rec);
};

}  // namespace epilog
