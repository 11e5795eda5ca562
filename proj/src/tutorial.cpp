#include "trailkit/tutorial.hpp"

#include <algorithm>
#include <cctype>

#include <nlohmann/json.hpp>

#include "trailkit/errors.hpp"
#include "trailkit/prompts.hpp"

namespace trailkit::tutorial {

using nlohmann::json;

const char* platform_name(Platform p) {
    switch (p) {
        case Platform::macOS: return "macOS";
        case Platform::Windows: return "Windows";
        case Platform::Linux: return "Linux";
        case Platform::Android: return "Android";
        case Platform::iOS: return "iOS";
    }
    return "Windows";
}

const char* target_type_name(TargetType t) {
    switch (t) {
        case TargetType::web_browser: return "web_browser";
        case TargetType::pc_app: return "pc_app";
        case TargetType::mobile_app: return "mobile_app";
        case TargetType::pc_os: return "pc_os";
        case TargetType::mobile_os: return "mobile_os";
    }
    return "web_browser";
}

static std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

Platform platform_from_string(const std::string& s) {
    const std::string k = lower(s);
    if (k == "macos") return Platform::macOS;
    if (k == "windows") return Platform::Windows;
    if (k == "linux") return Platform::Linux;
    if (k == "android") return Platform::Android;
    if (k == "ios") return Platform::iOS;
    throw SchemaError("invalid platform: " + s);
}

TargetType target_type_from_string(const std::string& s) {
    const std::string k = lower(s);
    if (k == "web browser" || k == "web_browser") return TargetType::web_browser;
    if (k == "pc app" || k == "pc_app") return TargetType::pc_app;
    if (k == "mobile app" || k == "mobile_app") return TargetType::mobile_app;
    if (k == "pc operating system" || k == "pc_os") return TargetType::pc_os;
    if (k == "mobile operating system" || k == "mobile_os") return TargetType::mobile_os;
    throw SchemaError("invalid target type: " + s);
}

void StructuredTutorial::validate() const {
    if (task_description.empty()) throw SchemaError("missing field: task_description");
    if (target_object.empty()) throw SchemaError("missing field: target_object");
    if (expected_result.empty()) throw SchemaError("missing field: expected_result");
    if (instructions.empty()) throw SchemaError("instructions must contain at least one step");
    if (target_type == TargetType::web_browser) {
        if (!target_web_url || target_web_url->empty())
            throw SchemaError("web_browser tutorials require target_web_url");
        const std::string low = lower(*target_web_url);
        if (low.rfind("http://", 0) != 0 && low.rfind("https://", 0) != 0)
            throw SchemaError("target_web_url must use http or https: " + *target_web_url);
    }
}

namespace {

/// Extracts the first balanced {...} object, skipping braces inside strings.
std::string first_object(const std::string& raw) {
    size_t start = raw.find('{');
    if (start == std::string::npos) throw SchemaError("no object found in response");
    int depth = 0;
    bool in_string = false;
    for (size_t i = start; i < raw.size(); ++i) {
        const char c = raw[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
        } else if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return raw.substr(start, i - start + 1);
        }
    }
    throw SchemaError("unterminated object in response");
}

/// Returns the value for a canonical key, accepting the template's spaced
/// alias, and records which original keys were consumed.
const json* pick(const json& obj, const std::string& canonical, const std::string& alias,
                 std::vector<std::string>& consumed) {
    if (auto it = obj.find(canonical); it != obj.end()) {
        consumed.push_back(canonical);
        return &*it;
    }
    if (!alias.empty()) {
        if (auto it = obj.find(alias); it != obj.end()) {
            consumed.push_back(alias);
            return &*it;
        }
    }
    return nullptr;
}

std::string require_string(const json* v, const std::string& field) {
    if (!v) throw SchemaError("missing field: " + field);
    if (!v->is_string()) throw SchemaError("field is not a string: " + field);
    return v->get<std::string>();
}

}  // namespace

ParsedTutorial parse_tutorial(const std::string& raw) {
    json obj;
    try {
        obj = json::parse(first_object(raw));
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed tutorial object: ") + e.what());
    }
    if (!obj.is_object()) throw SchemaError("tutorial payload is not an object");

    ParsedTutorial out;
    StructuredTutorial& t = out.tutorial;
    std::vector<std::string> consumed;

    if (const json* v = pick(obj, "platform", "", consumed))
        t.platform = platform_from_string(require_string(v, "platform"));
    else
        t.platform = Platform::Windows;  // template default when unspecified

    t.target_type =
        target_type_from_string(require_string(pick(obj, "target_type", "target type", consumed),
                                               "target_type"));
    t.target_object = require_string(pick(obj, "target_object", "target object", consumed),
                                     "target_object");

    if (const json* v = pick(obj, "target_web_url", "target web URL", consumed)) {
        if (v->is_string()) {
            const std::string url = v->get<std::string>();
            if (!url.empty() && lower(url) != "none") t.target_web_url = url;
        } else if (!v->is_null()) {
            throw SchemaError("field is not a string: target_web_url");
        }
    }

    t.task_description = require_string(pick(obj, "task_description", "task description", consumed),
                                        "task_description");
    if (const json* v = pick(obj, "prerequisites", "", consumed))
        t.prerequisites = require_string(v, "prerequisites");

    const json* steps = pick(obj, "instructions", "", consumed);
    if (!steps) throw SchemaError("missing field: instructions");
    if (!steps->is_array()) throw SchemaError("instructions must be a list");
    for (const auto& s : *steps) {
        if (!s.is_string()) throw SchemaError("instruction steps must be strings");
        t.instructions.push_back(s.get<std::string>());
    }

    if (const json* v = pick(obj, "instructions_steps", "instructions steps", consumed)) {
        size_t declared = 0;
        // LLM outputs are stringly typed: a numeric string is coerced.
        if (v->is_number_unsigned() || v->is_number_integer()) {
            declared = v->get<size_t>();
        } else if (v->is_string()) {
            const std::string s = v->get<std::string>();
            try {
                size_t used = 0;
                declared = std::stoull(s, &used);
                if (used != s.size()) throw std::invalid_argument(s);
            } catch (const std::exception&) {
                throw SchemaError("instructions_steps is not a number: " + s);
            }
        } else {
            throw SchemaError("instructions_steps is not a number");
        }
        if (declared != t.instructions.size())
            throw SchemaError("step-count mismatch: declared " + std::to_string(declared) +
                              ", listed " + std::to_string(t.instructions.size()));
    }

    t.expected_result = require_string(pick(obj, "expected_result", "expected result", consumed),
                                       "expected_result");

    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (std::find(consumed.begin(), consumed.end(), it.key()) == consumed.end())
            out.warnings.push_back("unknown key ignored: " + it.key());

    t.validate();
    return out;
}

json tutorial_to_json(const StructuredTutorial& t) {
    json j{{"platform", platform_name(t.platform)},
           {"target_type", target_type_name(t.target_type)},
           {"target_object", t.target_object},
           {"task_description", t.task_description},
           {"prerequisites", t.prerequisites},
           {"instructions", t.instructions},
           {"instructions_steps", t.instructions.size()},
           {"expected_result", t.expected_result}};
    if (t.target_web_url) j["target_web_url"] = *t.target_web_url;
    return j;
}

std::string serialize_tutorial(const StructuredTutorial& t) { return tutorial_to_json(t).dump(); }

std::vector<chat::ChatMessage> build_labeler_messages(const corpus::CandidateDoc& doc) {
    std::string user = prompts::substitute(prompts::kLabelerUserTemplate, "url", doc.url);
    user = prompts::substitute(user, "context", doc.text);
    return {{chat::Role::system, std::string(prompts::kLabelerSystem)},
            {chat::Role::user, std::move(user)}};
}

std::vector<chat::ChatMessage> build_paraphrase_messages(const corpus::CandidateDoc& doc) {
    return {{chat::Role::user,
             prompts::substitute(prompts::kParaphraseUserTemplate, "context", doc.text)}};
}

LabelOutcome label_document(const corpus::CandidateDoc& doc, const chat::Gateway& gateway) {
    if (doc.text.empty()) throw LabelParseError("document text is empty", "");
    auto result = gateway.call(build_labeler_messages(doc));
    LabelOutcome out;
    out.raw = result.content;
    out.usage = result.usage;
    out.usage.phase = chat::Phase::label;
    out.attempts = result.attempts;

    // Trim whitespace and surrounding quotes before comparing to "1"/"0".
    std::string_view v = out.raw;
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
    while (!v.empty() && is_space(v.front())) v.remove_prefix(1);
    while (!v.empty() && is_space(v.back())) v.remove_suffix(1);
    while (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') ||
                             (v.front() == '\'' && v.back() == '\''))) {
        v.remove_prefix(1);
        v.remove_suffix(1);
    }
    if (v == "1") out.is_tutorial = true;
    else if (v == "0") out.is_tutorial = false;
    else throw LabelParseError("labeler response is neither '1' nor '0'", out.raw);
    return out;
}

ParaphraseOutcome paraphrase_to_tutorial(const corpus::CandidateDoc& doc,
                                         const chat::Gateway& gateway) {
    auto result = gateway.call(build_paraphrase_messages(doc));
    ParsedTutorial parsed = parse_tutorial(result.content);
    ParaphraseOutcome out;
    out.tutorial = std::move(parsed.tutorial);
    out.warnings = std::move(parsed.warnings);
    out.usage = result.usage;
    out.usage.phase = chat::Phase::paraphrase;
    return out;
}

}  // namespace trailkit::tutorial
