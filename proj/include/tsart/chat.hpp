#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsart {

struct ChatMessage {
    std::string role;  // "system", "user", or "assistant"
    std::string content;
};

struct EndpointConfig {
    std::string base_url;  // e.g. "http://127.0.0.1:8080/v1"
    std::string api_key;
    std::string model;
    double temperature = 0.0;
    int timeout_ms = 30000;
    int max_retries = 3;
    int backoff_ms = 250;  // doubled per retry
};

/// Reads TSART_API_BASE, TSART_API_KEY, and TSART_MODEL; unset variables
/// leave the corresponding fields empty.
EndpointConfig endpoint_from_env();

struct EndpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ChatClient {
public:
    virtual ~ChatClient() = default;

    /// One completion for the given conversation.
    /// @throws EndpointError when no completion can be obtained.
    virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
};

/// Talks to a chat-completions-compatible endpoint. Retries transient
/// failures (connect errors, 408, 429, 5xx) with exponential backoff up to
/// max_retries; non-retryable statuses fail immediately. Diagnostics never
/// include the api key. Requests across all instances share a global
/// in-flight cap (see set_inflight_cap).
class HttpChatClient final : public ChatClient {
public:
    explicit HttpChatClient(EndpointConfig config);

    std::string complete(const std::vector<ChatMessage>& messages) override;

private:
    EndpointConfig config_;
};

/// Replays canned turns in order; exhausting the script raises EndpointError.
class ScriptedChatClient final : public ChatClient {
public:
    explicit ScriptedChatClient(std::vector<std::string> turns);

    std::string complete(const std::vector<ChatMessage>& messages) override;

    [[nodiscard]] std::size_t consumed() const { return next_; }

private:
    std::vector<std::string> turns_;
    std::size_t next_ = 0;
};

/// Caps concurrent HttpChatClient requests process-wide (default 4).
void set_inflight_cap(int cap);

/// Replaces every occurrence of `secret` in `text` with "***".
std::string redact(std::string text, const std::string& secret);

}  // namespace tsart
