#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "trailkit/chat.hpp"
#include "trailkit/env.hpp"
#include "trailkit/tutorial.hpp"

namespace trailkit::replay {

enum class Guidance { with_tutorial, goal_only };

const char* guidance_name(Guidance g);
Guidance guidance_from_string(const std::string& s);

struct TaskContext {
    std::string task_id;
    const tutorial::StructuredTutorial* tutorial = nullptr;
    Guidance guidance = Guidance::with_tutorial;
};

struct HistoryEntry {
    std::string inner_thought;
    std::string action_text;
};

struct Decision {
    std::string inner_thought;
    std::string action_text;
    chat::TokenUsage usage;  // zero for offline policies
};

/// A step policy. decide() must be deterministic for the same inputs and
/// safe to call concurrently from independent sessions.
class AgentPolicy {
  public:
    virtual ~AgentPolicy() = default;
    virtual Decision decide(const TaskContext& ctx, const std::vector<HistoryEntry>& history,
                            const env::Observation& observation) const = 0;
};

/// The agent prompt. with_tutorial renders task, prerequisites, numbered
/// instructions, expected result and target URL; goal_only renders only the
/// task and target URL. Both append the AXTree, the action grammar reference,
/// and the history as alternating thought/action lines.
std::vector<chat::ChatMessage> build_agent_prompt(const tutorial::StructuredTutorial& tut,
                                                  Guidance guidance,
                                                  const env::Observation& observation,
                                                  const std::vector<HistoryEntry>& history);

/// Fixed per-task scripts, indexed by history length; emits the fallback
/// action once a script is exhausted.
class ScriptedPolicy : public AgentPolicy {
  public:
    struct ScriptStep {
        std::string thought;
        std::string action;
    };

    void set_script(const std::string& task_id, std::vector<ScriptStep> steps);
    void set_fallback(const std::string& task_id, std::string action_text);

    /// {"<task_id>": {"steps": [{"thought":..., "action":...}], "fallback": ...}}
    static ScriptedPolicy from_file(const std::string& path);

    Decision decide(const TaskContext& ctx, const std::vector<HistoryEntry>& history,
                    const env::Observation& observation) const override;

  private:
    std::map<std::string, std::vector<ScriptStep>> scripts_;
    std::map<std::string, std::string> fallbacks_;
};

/// Follows the tutorial's instructions verbatim when they embed an action;
/// otherwise takes a seeded random walk over the bids it can see. Under
/// goal_only guidance there are no instructions, so every step is a walk.
class ForgetfulPolicy : public AgentPolicy {
  public:
    explicit ForgetfulPolicy(uint64_t seed) : seed_(seed) {}

    Decision decide(const TaskContext& ctx, const std::vector<HistoryEntry>& history,
                    const env::Observation& observation) const override;

  private:
    uint64_t seed_;
};

/// Asks a chat backend for each step; expects a "Thought:" line followed by
/// an "Action:" line (missing Action leaves the raw reply as action text,
/// which the orchestrator records as a parse failure).
class LlmPolicy : public AgentPolicy {
  public:
    explicit LlmPolicy(chat::Gateway gateway) : gateway_(std::move(gateway)) {}

    Decision decide(const TaskContext& ctx, const std::vector<HistoryEntry>& history,
                    const env::Observation& observation) const override;

  private:
    chat::Gateway gateway_;
};

/// First action-like substring in free text that parses, e.g. "click('12')"
/// inside an instruction sentence.
std::optional<std::string> extract_embedded_action(const std::string& text);

/// bids listed in a serialized AXTree, in document order.
std::vector<int> bids_in_axtree_text(const std::string& axtree_text);

}  // namespace trailkit::replay
