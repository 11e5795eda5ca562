#include "trailkit/replay.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

#include "trailkit/errors.hpp"
#include "trailkit/hash.hpp"

namespace trailkit::replay {

const char* final_status_name(FinalStatus s) {
    switch (s) {
        case FinalStatus::done: return "done";
        case FinalStatus::truncated: return "truncated";
        case FinalStatus::loop_detected: return "loop_detected";
        case FinalStatus::parse_failed: return "parse_failed";
    }
    return "truncated";
}

FinalStatus final_status_from_string(const std::string& s) {
    if (s == "done") return FinalStatus::done;
    if (s == "truncated") return FinalStatus::truncated;
    if (s == "loop_detected") return FinalStatus::loop_detected;
    if (s == "parse_failed") return FinalStatus::parse_failed;
    throw Error("unknown final status: " + s);
}

namespace {

uint64_t observation_hash(const env::Observation& obs) {
    uint64_t h = fnv1a64(obs.url);
    h = fnv1a64(obs.axtree_text, h);
    h = fnv1a64(obs.screenshot_ref, h);
    if (obs.last_action_error) h = fnv1a64(*obs.last_action_error, h);
    return h;
}

std::optional<ElementDetail> resolve_element(const env::EnvState& state,
                                             const env::Action& action) {
    const int bid = env::action_bid(action);
    if (bid <= 0) return std::nullopt;
    const env::Page* page = state.fixture->page_by_id(state.current_page_id);
    if (!page) return std::nullopt;
    const env::AXNode* node = env::find_bid(page->root, bid);
    if (!node) return std::nullopt;
    return ElementDetail{bid, node->role, node->name, node->box.center_x(),
                         node->box.center_y()};
}

}  // namespace

TrajectoryRecord run_replay(const std::string& task_id,
                            const tutorial::StructuredTutorial& tut,
                            const env::SiteFixture& fixture, const AgentPolicy& policy,
                            const ReplayConfig& config) {
    TrajectoryRecord record;
    record.task_id = task_id;
    record.site_id = fixture.site_id;
    record.guidance = guidance_name(config.guidance);
    record.seed = config.seed;
    record.tutorial = tut;
    record.usage.phase = chat::Phase::replay;

    auto [state, obs] = env::reset_at(fixture, tut.target_web_url);
    record.start_url = obs.url;
    record.outcome_reached = env::check_outcome(state, fixture);

    TaskContext ctx{task_id, &tut, config.guidance};
    std::vector<HistoryEntry> history;

    record.final_status = FinalStatus::truncated;
    uint64_t last_pair_hash = 0;
    uint32_t consecutive = 0;

    for (uint32_t i = 0; i < config.max_steps; ++i) {
        const auto started = std::chrono::steady_clock::now();
        Decision decision = policy.decide(ctx, history, obs);
        record.usage += decision.usage;

        TrajectoryStep step;
        step.observation = obs;
        step.inner_thought = decision.inner_thought;
        step.action_text = decision.action_text;

        env::Action action;
        try {
            action = env::parse_action(decision.action_text);
        } catch (const ActionParseError&) {
            // Kept for analysis; the evaluator is the arbiter of effectiveness.
            record.steps.push_back(std::move(step));
            record.final_status = FinalStatus::parse_failed;
            return record;
        }
        step.action = action;
        step.element_detail = resolve_element(state, action);

        const uint64_t pair_hash =
            fnv1a64(decision.action_text, observation_hash(obs) ^ kFnvOffset);
        consecutive = pair_hash == last_pair_hash ? consecutive + 1 : 1;
        last_pair_hash = pair_hash;

        auto [next_state, next_obs] = env::step(std::move(state), action);
        state = std::move(next_state);

        if (config.record_timing)
            step.duration_us = std::chrono::duration_cast<std::chrono::microseconds>(
                                   std::chrono::steady_clock::now() - started)
                                   .count();

        history.push_back({step.inner_thought, step.action_text});
        record.steps.push_back(std::move(step));
        record.outcome_reached = record.outcome_reached || env::check_outcome(state, fixture);
        obs = std::move(next_obs);

        if (env::is_done(action)) {
            record.final_status = FinalStatus::done;
            break;
        }
        if (consecutive >= config.loop_window) {
            record.final_status = FinalStatus::loop_detected;
            break;
        }
        if (config.auto_stop && record.outcome_reached) {
            record.final_status = FinalStatus::done;
            break;
        }
    }
    return record;
}

FixtureResolver url_resolver(const std::vector<env::SiteFixture>& fixtures) {
    return [&fixtures](const ReplayTask& task, std::string* reason) -> const env::SiteFixture* {
        if (!task.tutorial.target_web_url) {
            if (reason) *reason = "tutorial has no target_web_url";
            return nullptr;
        }
        for (const env::SiteFixture& f : fixtures)
            if (f.page_by_url(*task.tutorial.target_web_url)) return &f;
        if (reason) *reason = "no fixture serves url " + *task.tutorial.target_web_url;
        return nullptr;
    };
}

BatchResult batch_replay(const std::vector<ReplayTask>& tasks, const FixtureResolver& resolver,
                         const AgentPolicy& policy, const ReplayConfig& config,
                         uint32_t parallelism) {
    BatchResult result;
    result.stats.attempted = tasks.size();

    std::vector<std::optional<TrajectoryRecord>> slots(tasks.size());
    std::vector<std::pair<size_t, std::string>> skips;  // (task index, reason)
    std::mutex skip_mutex;

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            std::string reason;
            const env::SiteFixture* fixture = resolver(tasks[i], &reason);
            if (!fixture) {
                std::lock_guard<std::mutex> lock(skip_mutex);
                skips.emplace_back(i, reason.empty() ? "unresolvable" : reason);
                continue;
            }
            slots[i] = run_replay(tasks[i].task_id, tasks[i].tutorial, *fixture, policy, config);
        }
    };

    const uint32_t threads = std::max(1u, parallelism);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (uint32_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    for (auto& slot : slots) {
        if (!slot) continue;
        ++result.stats.completed;
        if (slot->outcome_reached) ++result.stats.outcome_count;
        result.records.push_back(std::move(*slot));
    }
    for (const auto& [idx, reason] : skips) ++result.stats.skipped[reason];

    std::sort(result.records.begin(), result.records.end(),
              [](const TrajectoryRecord& a, const TrajectoryRecord& b) {
                  return a.task_id < b.task_id;
              });
    return result;
}

}  // namespace trailkit::replay
