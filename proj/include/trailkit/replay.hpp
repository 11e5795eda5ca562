#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trailkit/policy.hpp"

namespace trailkit::replay {

struct ReplayConfig {
    uint32_t max_steps = 30;
    Guidance guidance = Guidance::with_tutorial;
    uint64_t seed = 0;
    uint32_t loop_window = 3;
    /// Stop as soon as the outcome predicate holds. Off by default: agents
    /// are recorded through max_steps unless they emit done().
    bool auto_stop = false;
    /// Wall-clock step timing. Off by default so identical runs serialize
    /// to identical bytes.
    bool record_timing = false;
};

struct ElementDetail {
    int bid = 0;
    std::string role;
    std::string name;
    int center_x = 0;
    int center_y = 0;

    bool operator==(const ElementDetail&) const = default;
};

struct TrajectoryStep {
    env::Observation observation;  // what the agent saw before acting
    std::string inner_thought;
    std::string action_text;  // raw policy output
    std::optional<env::Action> action;  // absent when parsing failed
    std::optional<ElementDetail> element_detail;
    int64_t duration_us = 0;
};

enum class FinalStatus { done, truncated, loop_detected, parse_failed };

const char* final_status_name(FinalStatus s);
FinalStatus final_status_from_string(const std::string& s);

struct TrajectoryRecord {
    std::string task_id;
    std::string site_id;
    std::string start_url;
    std::string guidance = "with_tutorial";
    uint64_t seed = 0;
    tutorial::StructuredTutorial tutorial;
    std::vector<TrajectoryStep> steps;
    FinalStatus final_status = FinalStatus::truncated;
    bool outcome_reached = false;
    chat::TokenUsage usage;
};

/// The guided-replay loop: observe, decide, parse, step, record — until
/// done(), max_steps, loop detection, or an unparseable action.
TrajectoryRecord run_replay(const std::string& task_id,
                            const tutorial::StructuredTutorial& tut,
                            const env::SiteFixture& fixture, const AgentPolicy& policy,
                            const ReplayConfig& config);

struct ReplayTask {
    std::string task_id;
    tutorial::StructuredTutorial tutorial;
};

/// Maps a tutorial to the fixture it replays against (nullptr = unresolvable).
using FixtureResolver =
    std::function<const env::SiteFixture*(const ReplayTask& task, std::string* reason)>;

/// Resolves a task to the fixture owning a page whose url equals the
/// tutorial's target_web_url.
FixtureResolver url_resolver(const std::vector<env::SiteFixture>& fixtures);

struct BatchStats {
    uint64_t attempted = 0;
    uint64_t completed = 0;
    uint64_t outcome_count = 0;
    std::map<std::string, uint64_t> skipped;  // reason -> count

    double outcome_rate() const {
        return completed == 0 ? 0.0
                              : static_cast<double>(outcome_count) / static_cast<double>(completed);
    }
};

struct BatchResult {
    std::vector<TrajectoryRecord> records;  // ordered by task_id
    BatchStats stats;
};

/// Replays every task, up to `parallelism` sessions at a time. Results are
/// identical regardless of parallelism.
BatchResult batch_replay(const std::vector<ReplayTask>& tasks, const FixtureResolver& resolver,
                         const AgentPolicy& policy, const ReplayConfig& config,
                         uint32_t parallelism);

}  // namespace trailkit::replay
