#include "tsart/chat.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace tsart {

namespace {

std::string env_or_empty(const char* name) {
    const char* value = std::getenv(name);
    return value ? value : "";
}

class InflightGate {
public:
    void set_cap(int cap) {
        std::lock_guard lock(mutex_);
        cap_ = cap > 0 ? cap : 1;
        cv_.notify_all();
    }

    void acquire() {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return active_ < cap_; });
        ++active_;
    }

    void release() {
        std::lock_guard lock(mutex_);
        --active_;
        cv_.notify_one();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int cap_ = 4;
    int active_ = 0;
};

InflightGate& gate() {
    static InflightGate instance;
    return instance;
}

struct SplitUrl {
    std::string host_port;  // scheme://host[:port]
    std::string path;       // path prefix without trailing slash
};

SplitUrl split_base_url(const std::string& base_url) {
    const std::size_t scheme = base_url.find("://");
    if (scheme == std::string::npos) {
        throw EndpointError("endpoint base url must start with http:// or https://");
    }
    const std::size_t path_start = base_url.find('/', scheme + 3);
    SplitUrl out;
    if (path_start == std::string::npos) {
        out.host_port = base_url;
    } else {
        out.host_port = base_url.substr(0, path_start);
        out.path = base_url.substr(path_start);
    }
    while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
    return out;
}

bool retryable_status(int status) {
    return status == 408 || status == 429 || status >= 500;
}

}  // namespace

EndpointConfig endpoint_from_env() {
    EndpointConfig config;
    config.base_url = env_or_empty("TSART_API_BASE");
    config.api_key = env_or_empty("TSART_API_KEY");
    config.model = env_or_empty("TSART_MODEL");
    return config;
}

std::string redact(std::string text, const std::string& secret) {
    if (secret.empty()) return text;
    std::size_t pos = 0;
    while ((pos = text.find(secret, pos)) != std::string::npos) {
        text.replace(pos, secret.size(), "***");
        pos += 3;
    }
    return text;
}

HttpChatClient::HttpChatClient(EndpointConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) {
        throw EndpointError("no endpoint configured: set TSART_API_BASE or pass --api-base");
    }
    if (config_.timeout_ms <= 0) throw EndpointError("endpoint timeout must be positive");
    if (config_.max_retries < 0) throw EndpointError("max retries must be non-negative");
}

std::string HttpChatClient::complete(const std::vector<ChatMessage>& messages) {
    const SplitUrl url = split_base_url(config_.base_url);

    nlohmann::json body;
    body["model"] = config_.model;
    body["temperature"] = config_.temperature;
    auto& msgs = body["messages"] = nlohmann::json::array();
    for (const auto& m : messages) {
        msgs.push_back({{"role", m.role}, {"content", m.content}});
    }
    const std::string payload = body.dump();

    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            const auto delay = std::chrono::milliseconds(
                static_cast<long long>(config_.backoff_ms) * (1LL << (attempt - 1)));
            std::this_thread::sleep_for(delay);
        }

        httplib::Client client(url.host_port);
        client.set_connection_timeout(0, config_.timeout_ms * 1000LL);
        client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
        httplib::Headers headers;
        if (!config_.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + config_.api_key);
        }

        gate().acquire();
        auto result = client.Post(url.path + "/chat/completions", headers, payload,
                                  "application/json");
        gate().release();

        if (!result) {
            last_error = "connection failed: " + httplib::to_string(result.error());
            continue;
        }
        if (result->status != 200) {
            last_error = "endpoint returned status " + std::to_string(result->status) + ": " +
                         redact(result->body, config_.api_key);
            if (retryable_status(result->status)) continue;
            throw EndpointError(last_error);
        }
        try {
            const auto doc = nlohmann::json::parse(result->body);
            return doc.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw EndpointError(std::string("malformed completion body: ") + e.what());
        }
    }
    throw EndpointError("endpoint unreachable after " + std::to_string(config_.max_retries + 1) +
                        " attempts; last error: " + last_error);
}

ScriptedChatClient::ScriptedChatClient(std::vector<std::string> turns)
    : turns_(std::move(turns)) {}

std::string ScriptedChatClient::complete(const std::vector<ChatMessage>&) {
    if (next_ >= turns_.size()) {
        throw EndpointError("scripted client exhausted after " + std::to_string(turns_.size()) +
                            " turns");
    }
    return turns_[next_++];
}

void set_inflight_cap(int cap) { gate().set_cap(cap); }

}  // namespace tsart
