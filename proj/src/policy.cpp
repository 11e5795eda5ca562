#include "trailkit/policy.hpp"

#include <cctype>
#include <cstring>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "trailkit/actions.hpp"
#include "trailkit/errors.hpp"
#include "trailkit/hash.hpp"

namespace trailkit::replay {

using nlohmann::json;

const char* guidance_name(Guidance g) {
    return g == Guidance::with_tutorial ? "with_tutorial" : "goal_only";
}

Guidance guidance_from_string(const std::string& s) {
    if (s == "with_tutorial" || s == "with-tutorial") return Guidance::with_tutorial;
    if (s == "goal_only" || s == "goal-only") return Guidance::goal_only;
    throw Error("unknown guidance mode: " + s);
}

static const char* kActionGrammar =
    "Available actions:\n"
    "  goto('<url>')              navigate to a url\n"
    "  click('<bid>')             click the element\n"
    "  dblclick('<bid>')          double-click the element\n"
    "  fill('<bid>', '<text>')    replace the element's value with text\n"
    "  type('<bid>', '<text>')    type text into the element\n"
    "  press('<key combo>')       press a key or combo\n"
    "  hover('<bid>')             move the pointer over the element\n"
    "  scroll(<dx>, <dy>)         scroll the viewport\n"
    "  select_option('<bid>', '<value>')  choose an option\n"
    "  clear('<bid>')             clear the element's value\n"
    "  done('<message>')          declare the task finished";

std::vector<chat::ChatMessage> build_agent_prompt(const tutorial::StructuredTutorial& tut,
                                                  Guidance guidance,
                                                  const env::Observation& observation,
                                                  const std::vector<HistoryEntry>& history) {
    std::string system =
        "You are a web navigation agent operating on an accessibility tree. "
        "Elements are addressed by the [bid] shown at the start of each line.\n\n";
    system += kActionGrammar;
    system +=
        "\n\nRespond with exactly two lines:\n"
        "Thought: <your reasoning>\n"
        "Action: <one action>";

    std::string user = "Task: " + tut.task_description + "\n";
    if (tut.target_web_url) user += "Target URL: " + *tut.target_web_url + "\n";
    if (guidance == Guidance::with_tutorial) {
        if (!tut.prerequisites.empty()) user += "Prerequisites: " + tut.prerequisites + "\n";
        user += "Instructions:\n";
        for (size_t i = 0; i < tut.instructions.size(); ++i)
            user += "  " + std::to_string(i + 1) + ". " + tut.instructions[i] + "\n";
        user += "Expected result: " + tut.expected_result + "\n";
    }
    user += "\nCurrent page: " + observation.url + "\n";
    user += "Accessibility tree:\n" + observation.axtree_text + "\n";
    if (observation.last_action_error)
        user += "Last action error: " + *observation.last_action_error + "\n";
    if (!history.empty()) {
        user += "\nHistory:\n";
        for (const HistoryEntry& h : history) {
            user += "Thought: " + h.inner_thought + "\n";
            user += "Action: " + h.action_text + "\n";
        }
    }
    return {{chat::Role::system, std::move(system)}, {chat::Role::user, std::move(user)}};
}

void ScriptedPolicy::set_script(const std::string& task_id, std::vector<ScriptStep> steps) {
    scripts_[task_id] = std::move(steps);
}

void ScriptedPolicy::set_fallback(const std::string& task_id, std::string action_text) {
    fallbacks_[task_id] = std::move(action_text);
}

ScriptedPolicy ScriptedPolicy::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open scripts file: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw Error("malformed scripts file " + path + ": " + e.what());
    }
    ScriptedPolicy policy;
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::vector<ScriptStep> steps;
        for (const auto& sj : it.value().at("steps"))
            steps.push_back({sj.value("thought", ""), sj.at("action").get<std::string>()});
        policy.set_script(it.key(), std::move(steps));
        if (it.value().contains("fallback"))
            policy.set_fallback(it.key(), it.value()["fallback"].get<std::string>());
    }
    return policy;
}

Decision ScriptedPolicy::decide(const TaskContext& ctx, const std::vector<HistoryEntry>& history,
                                const env::Observation&) const {
    const size_t idx = history.size();
    if (auto it = scripts_.find(ctx.task_id); it != scripts_.end() && idx < it->second.size()) {
        const ScriptStep& s = it->second[idx];
        return {s.thought.empty() ? "Executing scripted step " + std::to_string(idx + 1)
                                  : s.thought,
                s.action, {}};
    }
    if (auto it = fallbacks_.find(ctx.task_id); it != fallbacks_.end())
        return {"Script exhausted.", it->second, {}};
    return {"Script exhausted; stopping.", "done('script exhausted')", {}};
}

std::optional<std::string> extract_embedded_action(const std::string& text) {
    static const char* kVerbs[] = {"goto",  "click",  "dblclick", "fill",
                                   "type",  "press",  "hover",    "scroll",
                                   "select_option", "clear", "done"};
    for (size_t i = 0; i < text.size(); ++i) {
        for (const char* verb : kVerbs) {
            const size_t len = std::strlen(verb);
            if (text.compare(i, len, verb) != 0) continue;
            // word boundary before the verb
            if (i > 0 && (std::isalnum(static_cast<unsigned char>(text[i - 1])) ||
                          text[i - 1] == '_'))
                continue;
            size_t j = i + len;
            while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
            if (j >= text.size() || text[j] != '(') continue;
            // find the matching close paren, honoring quotes
            char in_quote = 0;
            for (size_t k = j; k < text.size(); ++k) {
                const char c = text[k];
                if (in_quote) {
                    if (c == '\\') ++k;
                    else if (c == in_quote) in_quote = 0;
                } else if (c == '\'' || c == '"') {
                    in_quote = c;
                } else if (c == ')') {
                    std::string candidate = text.substr(i, k - i + 1);
                    try {
                        env::parse_action(candidate);
                        return candidate;
                    } catch (const ActionParseError&) {
                        break;
                    }
                }
            }
        }
    }
    return std::nullopt;
}

std::vector<int> bids_in_axtree_text(const std::string& axtree_text) {
    std::vector<int> bids;
    size_t pos = 0;
    while (pos < axtree_text.size()) {
        size_t eol = axtree_text.find('\n', pos);
        if (eol == std::string::npos) eol = axtree_text.size();
        size_t i = pos;
        while (i < eol && axtree_text[i] == ' ') ++i;
        if (i < eol && axtree_text[i] == '[') {
            ++i;
            int bid = 0;
            bool any = false;
            while (i < eol && std::isdigit(static_cast<unsigned char>(axtree_text[i]))) {
                bid = bid * 10 + (axtree_text[i] - '0');
                any = true;
                ++i;
            }
            if (any && i < eol && axtree_text[i] == ']') bids.push_back(bid);
        }
        pos = eol + 1;
    }
    return bids;
}

Decision ForgetfulPolicy::decide(const TaskContext& ctx, const std::vector<HistoryEntry>& history,
                                 const env::Observation& observation) const {
    const size_t idx = history.size();
    if (ctx.guidance == Guidance::with_tutorial && ctx.tutorial &&
        idx < ctx.tutorial->instructions.size()) {
        const std::string& instruction = ctx.tutorial->instructions[idx];
        if (auto action = extract_embedded_action(instruction))
            return {"Following instruction " + std::to_string(idx + 1) + ": " + instruction,
                    *action,
                    {}};
    }
    // No instruction to follow: seeded random walk over visible bids.
    std::vector<int> bids = bids_in_axtree_text(observation.axtree_text);
    if (bids.empty()) return {"Nothing visible to interact with.", "done('nothing to do')", {}};
    std::mt19937_64 rng(mix_seed(mix_seed(seed_, fnv1a64(ctx.task_id)), idx));
    const int bid = bids[rng() % bids.size()];
    return {"Exploring: trying element [" + std::to_string(bid) + "].",
            "click('" + std::to_string(bid) + "')",
            {}};
}

Decision LlmPolicy::decide(const TaskContext& ctx, const std::vector<HistoryEntry>& history,
                           const env::Observation& observation) const {
    auto result = gateway_.call(build_agent_prompt(*ctx.tutorial, ctx.guidance, observation, history));
    Decision d;
    d.usage = result.usage;
    d.usage.phase = chat::Phase::replay;

    // Pull "Thought:" / "Action:" lines out of the reply.
    std::string thought, action;
    size_t pos = 0;
    const std::string& content = result.content;
    while (pos <= content.size()) {
        size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string line = content.substr(pos, eol - pos);
        if (line.rfind("Thought:", 0) == 0 && thought.empty())
            thought = line.substr(8);
        else if (line.rfind("Action:", 0) == 0 && action.empty())
            action = line.substr(7);
        pos = eol + 1;
    }
    auto trim = [](std::string& s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    };
    trim(thought);
    trim(action);
    d.inner_thought = thought;
    // With no Action line the raw reply is recorded; the orchestrator will
    // mark the step parse_failed if it is not an action.
    d.action_text = action.empty() ? content : action;
    return d;
}

}  // namespace trailkit::replay
