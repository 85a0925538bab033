#include "epilog/http_backend.hpp"

#include <chrono>
#include <cstdlib>
#include <semaphore>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace epilog {

using nlohmann::json;

namespace {

struct ParsedUrl {
    std::string host;
    int port = 80;
};

ParsedUrl parse_base_url(const std::string& base_url) {
    std::string rest = base_url;
    const std::string scheme = "http://";
    if (rest.rfind(scheme, 0) == 0) {
        rest = rest.substr(scheme.size());
    }
    while (!rest.empty() && rest.back() == '/') {
        rest.pop_back();
    }
    ParsedUrl out;
    const std::size_t colon = rest.find(':');
    if (colon == std::string::npos) {
        out.host = rest;
    } else {
        out.host = rest.substr(0, colon);
        out.port = std::atoi(rest.c_str() + colon + 1);
    }
    if (out.host.empty() || out.port <= 0) {
        throw ConfigError("bad base_url: " + base_url);
    }
    return out;
}

int retry_after_seconds(const httplib::Response& res) {
    if (!res.has_header("Retry-After")) {
        return 0;
    }
    return std::atoi(res.get_header_value("Retry-After").c_str());
}

}  // namespace

struct HttpBackend::Impl {
    ParsedUrl url;
    std::counting_semaphore<64> pool;

    explicit Impl(const HttpBackendConfig& config)
        : url(parse_base_url(config.base_url)),
          pool(std::max(1, std::min(64, config.max_in_flight))) {}
};

HttpBackend::HttpBackend(HttpBackendConfig config)
    : config_(std::move(config)), impl_(std::make_unique<Impl>(config_)) {}

HttpBackend::~HttpBackend() = default;

void HttpBackend::record(RequestRecord rec) {
    std::lock_guard lock(log_mutex_);
    log_.push_back(std::move(rec));
}

std::vector<RequestRecord> HttpBackend::request_log() const {
    std::lock_guard lock(log_mutex_);
    return log_;
}

std::string HttpBackend::complete(const CompletionRequest& request) {
    json payload{{"model", config_.model},
                 {"messages", json::array({json{{"role", "user"}, {"content", request.prompt}}})},
                 {"temperature", request.temperature},
                 {"max_tokens", request.max_tokens}};
    if (!request.stop.empty()) {
        payload["stop"] = request.stop;
    }
    const std::string body = payload.dump();

    std::string bearer;
    if (!config_.api_key_env.empty()) {
        if (const char* token = std::getenv(config_.api_key_env.c_str())) {
            bearer = token;
        }
    }

    impl_->pool.acquire();
    struct Release {
        std::counting_semaphore<64>& pool;
        ~Release() { pool.release(); }
    } release{impl_->pool};

    std::string last_error = "no attempts made";
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        httplib::Client client(impl_->url.host, impl_->url.port);
        const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);

        httplib::Headers headers;
        if (!bearer.empty()) {
            headers.emplace("Authorization", "Bearer " + bearer);
        }

        const auto start = std::chrono::steady_clock::now();
        httplib::Result res = client.Post(config_.path, headers, body, "application/json");
        const double latency =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();

        if (!res) {
            const std::string detail = httplib::to_string(res.error());
            record(RequestRecord{0, latency, false, detail});
            last_error = detail;
            if (res.error() == httplib::Error::ConnectionTimeout ||
                res.error() == httplib::Error::Read || res.error() == httplib::Error::Write) {
                if (attempt == config_.max_retries) {
                    throw Timeout("request timed out: " + detail);
                }
            } else if (attempt == config_.max_retries) {
                throw BackendError("transport failure: " + detail);
            }
            continue;
        }

        if (res->status == 200) {
            record(RequestRecord{res->status, latency, true, ""});
            json parsed;
            try {
                parsed = json::parse(res->body);
            } catch (const json::exception& e) {
                throw MalformedResponse(std::string("bad response body: ") + e.what());
            }
            try {
                return parsed.at("choices").at(0).at("message").at("content")
                    .get<std::string>();
            } catch (const json::exception& e) {
                throw MalformedResponse(std::string("missing completion field: ") + e.what());
            }
        }

        record(RequestRecord{res->status, latency, false, res->body});
        last_error = "status " + std::to_string(res->status);
        const bool retryable = res->status == 429 || res->status >= 500;
        if (!retryable || attempt == config_.max_retries) {
            throw HttpStatus(res->status, res->body);
        }
        const int wait = retry_after_seconds(*res);
        if (wait > 0) {
            std::this_thread::sleep_for(std::chrono::seconds(std::min(wait, 10)));
        }
    }
    throw BackendError("request failed: " + last_error);
}

}  // namespace epilog
