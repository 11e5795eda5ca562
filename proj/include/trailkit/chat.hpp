#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace trailkit::chat {

enum class Role { system, user, assistant };

const char* role_name(Role r);

struct ChatMessage {
    Role role = Role::user;
    std::string content;
};

enum class Phase { label, paraphrase, replay, evaluate };

const char* phase_name(Phase p);

struct TokenUsage {
    uint64_t prompt_tokens = 0;
    uint64_t completion_tokens = 0;
    Phase phase = Phase::label;

    TokenUsage& operator+=(const TokenUsage& o) {
        prompt_tokens += o.prompt_tokens;
        completion_tokens += o.completion_tokens;
        return *this;
    }
};

struct BackendConfig {
    std::string endpoint_url;
    std::string model_id;
    std::string api_key_env = "TRAILKIT_API_KEY";
    uint32_t max_retries = 2;
    double timeout_seconds = 60.0;
    std::string backend_kind = "mock";  // "remote" or "mock"

    void validate() const;
    static BackendConfig from_json(const nlohmann::json& j);
};

struct ChatResult {
    std::string content;
    TokenUsage usage;
};

/// Anything that can answer a chat prompt. Implementations must be safe to
/// call concurrently for distinct requests.
class ChatBackend {
  public:
    virtual ~ChatBackend() = default;
    virtual ChatResult complete(const std::vector<ChatMessage>& messages) = 0;
};

/// Stable fingerprint of a rendered message list (FNV-1a over role/content
/// pairs), hex-encoded. This is the mock backend's scripting key.
std::string prompt_fingerprint(const std::vector<ChatMessage>& messages);

/// Whitespace-delimited word count; the mock backend's token-usage proxy.
uint64_t word_count(std::string_view text);

/// Deterministic offline backend. Responses are looked up by exact prompt
/// fingerprint first, then by substring match against the user content, then
/// the default. With no match: strict mode throws, otherwise empty response.
class MockBackend : public ChatBackend {
  public:
    MockBackend() = default;

    void script_fingerprint(const std::string& fingerprint, std::string response);
    void script_contains(std::string needle, std::string response);
    void set_default_response(std::string response);
    void set_strict(bool strict) { strict_ = strict; }

    /// Script file: {"responses": [{"fingerprint"|"contains": ..., "response": ...}],
    ///               "default": ..., "strict": bool}
    static MockBackend from_json(const nlohmann::json& j);
    static MockBackend from_file(const std::string& path);

    ChatResult complete(const std::vector<ChatMessage>& messages) override;

  private:
    std::map<std::string, std::string> by_fingerprint_;
    std::vector<std::pair<std::string, std::string>> by_contains_;
    std::optional<std::string> default_response_;
    bool strict_ = true;
};

/// HTTP chat-completion backend. Request: {model, messages:[{role,content}]};
/// response: {choices[0].message.content, usage{prompt_tokens,
/// completion_tokens}}. Credentials come from the env var named in the config.
class RemoteBackend : public ChatBackend {
  public:
    explicit RemoteBackend(BackendConfig config);
    ChatResult complete(const std::vector<ChatMessage>& messages) override;

  private:
    BackendConfig config_;
};

/// Wraps a backend with the retry policy. A call that fails max_retries
/// times and then succeeds is a success; one more failure is a BackendError.
class Gateway {
  public:
    Gateway(std::shared_ptr<ChatBackend> backend, uint32_t max_retries)
        : backend_(std::move(backend)), max_retries_(max_retries) {}

    struct CallResult {
        std::string content;
        TokenUsage usage;
        uint32_t attempts = 1;
    };

    CallResult call(const std::vector<ChatMessage>& messages) const;

    ChatBackend& backend() { return *backend_; }

  private:
    std::shared_ptr<ChatBackend> backend_;
    uint32_t max_retries_;
};

/// Builds the backend described by the config. For "mock", an optional
/// script file configures the responses.
Gateway make_gateway(const BackendConfig& config, const std::string& mock_script_path = "");

}  // namespace trailkit::chat
