#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "trailkit/chat.hpp"
#include "trailkit/corpus_filter.hpp"

namespace trailkit::tutorial {

enum class Platform { macOS, Windows, Linux, Android, iOS };
enum class TargetType { web_browser, pc_app, mobile_app, pc_os, mobile_os };

const char* platform_name(Platform p);
const char* target_type_name(TargetType t);
Platform platform_from_string(const std::string& s);      // throws SchemaError
TargetType target_type_from_string(const std::string& s);  // throws SchemaError

/// The standardized tutorial template: platform/target tags, a one-line task,
/// prerequisites, numbered steps, and the expected result.
struct StructuredTutorial {
    Platform platform = Platform::Windows;
    TargetType target_type = TargetType::web_browser;
    std::string target_object;
    std::optional<std::string> target_web_url;
    std::string task_description;
    std::string prerequisites;
    std::vector<std::string> instructions;
    std::string expected_result;

    size_t instructions_steps() const { return instructions.size(); }
    void validate() const;  // throws SchemaError
    bool operator==(const StructuredTutorial&) const = default;
};

struct ParsedTutorial {
    StructuredTutorial tutorial;
    std::vector<std::string> warnings;  // unknown keys, tolerated oddities
};

/// Parses the first structured object found in `raw`. Accepts both the
/// template's spaced keys ("target web URL") and canonical snake_case keys;
/// emits the canonical form. Unknown keys are collected as warnings.
ParsedTutorial parse_tutorial(const std::string& raw);

/// Canonical snake_case serialization; parse_tutorial(serialize(t)) == t.
nlohmann::json tutorial_to_json(const StructuredTutorial& t);
std::string serialize_tutorial(const StructuredTutorial& t);

struct LabelOutcome {
    bool is_tutorial = false;
    std::string raw;
    chat::TokenUsage usage;
    uint32_t attempts = 1;
};

/// Sends the labeler prompt for one document. "1" => tutorial, "0" => not;
/// anything else is a LabelParseError. Surrounding whitespace and quotes on
/// the response are ignored.
LabelOutcome label_document(const corpus::CandidateDoc& doc, const chat::Gateway& gateway);

struct ParaphraseOutcome {
    StructuredTutorial tutorial;
    std::vector<std::string> warnings;
    chat::TokenUsage usage;
};

/// Sends the tag-and-paraphrase prompt and parses the response.
ParaphraseOutcome paraphrase_to_tutorial(const corpus::CandidateDoc& doc,
                                         const chat::Gateway& gateway);

std::vector<chat::ChatMessage> build_labeler_messages(const corpus::CandidateDoc& doc);
std::vector<chat::ChatMessage> build_paraphrase_messages(const corpus::CandidateDoc& doc);

}  // namespace trailkit::tutorial
