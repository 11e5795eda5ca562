#include "trailkit/chat.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#define CPPHTTPLIB_NO_EXCEPTIONS 0
#include <httplib.h>

#include "trailkit/errors.hpp"
#include "trailkit/hash.hpp"

namespace trailkit::chat {

using nlohmann::json;

const char* role_name(Role r) {
    switch (r) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
    }
    return "user";
}

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::label: return "label";
        case Phase::paraphrase: return "paraphrase";
        case Phase::replay: return "replay";
        case Phase::evaluate: return "evaluate";
    }
    return "label";
}

void BackendConfig::validate() const {
    if (backend_kind != "remote" && backend_kind != "mock")
        throw BackendError("backend_kind must be 'remote' or 'mock'");
    if (backend_kind == "remote" && endpoint_url.empty())
        throw BackendError("remote backend requires endpoint_url");
}

BackendConfig BackendConfig::from_json(const json& j) {
    BackendConfig cfg;
    cfg.endpoint_url = j.value("endpoint_url", cfg.endpoint_url);
    cfg.model_id = j.value("model_id", cfg.model_id);
    cfg.api_key_env = j.value("api_key_env", cfg.api_key_env);
    cfg.max_retries = j.value("max_retries", cfg.max_retries);
    cfg.timeout_seconds = j.value("timeout_seconds", cfg.timeout_seconds);
    cfg.backend_kind = j.value("backend_kind", cfg.backend_kind);
    cfg.validate();
    return cfg;
}

std::string prompt_fingerprint(const std::vector<ChatMessage>& messages) {
    uint64_t h = kFnvOffset;
    for (const ChatMessage& m : messages) {
        h = fnv1a64(role_name(m.role), h);
        h = fnv1a64("\x1e", h);
        h = fnv1a64(m.content, h);
        h = fnv1a64("\x1f", h);
    }
    return to_hex(h);
}

uint64_t word_count(std::string_view text) {
    uint64_t n = 0;
    bool in_word = false;
    for (char c : text) {
        const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r';
        if (!space && !in_word) ++n;
        in_word = !space;
    }
    return n;
}

static TokenUsage usage_proxy(const std::vector<ChatMessage>& messages,
                              const std::string& response) {
    TokenUsage usage;
    for (const ChatMessage& m : messages) usage.prompt_tokens += word_count(m.content);
    usage.completion_tokens = word_count(response);
    return usage;
}

void MockBackend::script_fingerprint(const std::string& fingerprint, std::string response) {
    by_fingerprint_[fingerprint] = std::move(response);
}

void MockBackend::script_contains(std::string needle, std::string response) {
    by_contains_.emplace_back(std::move(needle), std::move(response));
}

void MockBackend::set_default_response(std::string response) {
    default_response_ = std::move(response);
}

MockBackend MockBackend::from_json(const json& j) {
    MockBackend mock;
    if (j.contains("responses")) {
        for (const auto& entry : j["responses"]) {
            std::string response = entry.at("response").get<std::string>();
            if (entry.contains("fingerprint"))
                mock.script_fingerprint(entry["fingerprint"].get<std::string>(),
                                        std::move(response));
            else if (entry.contains("contains"))
                mock.script_contains(entry["contains"].get<std::string>(), std::move(response));
            else
                throw BackendError("mock script entry needs 'fingerprint' or 'contains'");
        }
    }
    if (j.contains("default")) mock.set_default_response(j["default"].get<std::string>());
    mock.set_strict(j.value("strict", true));
    return mock;
}

MockBackend MockBackend::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw BackendError("cannot open mock script: " + path);
    json j;
    f >> j;
    return from_json(j);
}

ChatResult MockBackend::complete(const std::vector<ChatMessage>& messages) {
    const std::string fp = prompt_fingerprint(messages);
    const std::string* response = nullptr;
    if (auto it = by_fingerprint_.find(fp); it != by_fingerprint_.end()) {
        response = &it->second;
    } else {
        std::string user_content;
        for (const ChatMessage& m : messages)
            if (m.role == Role::user) user_content += m.content;
        for (const auto& [needle, canned] : by_contains_) {
            if (user_content.find(needle) != std::string::npos) {
                response = &canned;
                break;
            }
        }
    }
    if (!response && default_response_) response = &*default_response_;
    if (!response) {
        if (strict_) throw BackendError("mock backend: unscripted prompt fingerprint " + fp);
        static const std::string empty;
        response = &empty;
    }
    return ChatResult{*response, usage_proxy(messages, *response)};
}

RemoteBackend::RemoteBackend(BackendConfig config) : config_(std::move(config)) {
    config_.validate();
}

ChatResult RemoteBackend::complete(const std::vector<ChatMessage>& messages) {
    // Split endpoint into host part and path.
    const std::string& url = config_.endpoint_url;
    size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw BackendError("malformed endpoint_url: " + url);
    size_t path_start = url.find('/', scheme_end + 3);
    const std::string base = path_start == std::string::npos ? url : url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(base);
    client.set_connection_timeout(static_cast<time_t>(config_.timeout_seconds));
    client.set_read_timeout(static_cast<time_t>(config_.timeout_seconds));

    httplib::Headers headers;
    if (!config_.api_key_env.empty()) {
        if (const char* key = std::getenv(config_.api_key_env.c_str()))
            headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    json body = {{"model", config_.model_id}, {"messages", json::array()}};
    for (const ChatMessage& m : messages)
        body["messages"].push_back({{"role", role_name(m.role)}, {"content", m.content}});

    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) throw BackendError("transport failure calling " + url);
    if (res->status < 200 || res->status >= 300)
        throw BackendError("backend returned HTTP " + std::to_string(res->status));

    try {
        json reply = json::parse(res->body);
        ChatResult result;
        result.content = reply.at("choices").at(0).at("message").at("content").get<std::string>();
        if (reply.contains("usage")) {
            result.usage.prompt_tokens = reply["usage"].value("prompt_tokens", 0ull);
            result.usage.completion_tokens = reply["usage"].value("completion_tokens", 0ull);
        }
        return result;
    } catch (const json::exception& e) {
        throw BackendError(std::string("malformed backend response: ") + e.what());
    }
}

Gateway::CallResult Gateway::call(const std::vector<ChatMessage>& messages) const {
    uint32_t attempt = 0;
    for (;;) {
        ++attempt;
        try {
            ChatResult r = backend_->complete(messages);
            return CallResult{std::move(r.content), r.usage, attempt};
        } catch (const BackendError&) {
            if (attempt > max_retries_) throw;
        }
    }
}

Gateway make_gateway(const BackendConfig& config, const std::string& mock_script_path) {
    config.validate();
    std::shared_ptr<ChatBackend> backend;
    if (config.backend_kind == "mock") {
        if (mock_script_path.empty())
            backend = std::make_shared<MockBackend>();
        else
            backend = std::make_shared<MockBackend>(MockBackend::from_file(mock_script_path));
    } else {
        backend = std::make_shared<RemoteBackend>(config);
    }
    return Gateway(std::move(backend), config.max_retries);
}

}  // namespace trailkit::chat
