#include <chrono>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "epilog/embedding.hpp"

namespace epilog {

using nlohmann::json;

RemoteProvider::RemoteProvider(RemoteProviderConfig config) : config_(std::move(config)) {
    if (config_.dim < 1) {
        throw InvalidDim("remote provider dim must be positive");
    }
}

std::string RemoteProvider::provider_id() const {
    return "remote:" + config_.base_url + config_.path;
}

Embedding RemoteProvider::embed(const std::string& text) const {
    bool blank = true;
    for (unsigned char c : text) {
        if (!std::isspace(c)) {
            blank = false;
            break;
        }
    }
    if (blank) {
        throw EmptyInput("embed: empty text");
    }
    return embed_batch({text}).front();
}

std::vector<Embedding> RemoteProvider::embed_batch(const std::vector<std::string>& texts) const {
    std::string rest = config_.base_url;
    if (rest.rfind("http://", 0) == 0) {
        rest = rest.substr(7);
    }
    std::string host = rest;
    int port = 80;
    if (const std::size_t colon = rest.find(':'); colon != std::string::npos) {
        host = rest.substr(0, colon);
        port = std::atoi(rest.c_str() + colon + 1);
    }

    const std::string body = json{{"texts", texts}}.dump();
    std::string last_error = "no attempts";
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        httplib::Client client(host, port);
        const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);

        httplib::Result res = client.Post(config_.path, body, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "status " + std::to_string(res->status);
            continue;
        }
        try {
            const json parsed = json::parse(res->body);
            auto rows = parsed.at("embeddings").get<std::vector<std::vector<double>>>();
            std::vector<Embedding> out;
            out.reserve(rows.size());
            for (auto& row : rows) {
                if (static_cast<int>(row.size()) != config_.dim) {
                    throw ProviderUnavailable("remote embedding has dim " +
                                              std::to_string(row.size()) + ", expected " +
                                              std::to_string(config_.dim));
                }
                out.push_back(Embedding{std::move(row)});
            }
            if (out.size() != texts.size()) {
                throw ProviderUnavailable("remote endpoint returned " +
                                          std::to_string(out.size()) + " embeddings for " +
                                          std::to_string(texts.size()) + " texts");
            }
            return out;
        } catch (const json::exception& e) {
            throw ProviderUnavailable(std::string("bad embedding response: ") + e.what());
        }
    }
    throw ProviderUnavailable("embedding endpoint unreachable: " + last_error);
}

}  // namespace epilog
