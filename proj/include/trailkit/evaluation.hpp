#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "trailkit/chat.hpp"
#include "trailkit/replay.hpp"
#include "trailkit/trajectory_io.hpp"

namespace trailkit::eval {

enum class VerdictStatus { success, failure };
enum class VerdictSource { llm, oracle };

struct EvalVerdict {
    VerdictStatus status = VerdictStatus::failure;
    std::string thoughts;
    VerdictSource source = VerdictSource::llm;
    std::vector<std::string> warnings;

    bool success() const { return status == VerdictStatus::success; }
};

nlohmann::json verdict_to_json(const EvalVerdict& v, const std::string& task_id);

/// `{task description; inner thought 1; action 1; inner thought 2; action 2;
/// ...}` with canonical action rendering. Parse-failed steps contribute
/// their raw action text.
std::string render_transcript(const replay::TrajectoryRecord& record);

/// Builds the evaluator prompt for a trajectory.
std::vector<chat::ChatMessage> build_evaluator_messages(const replay::TrajectoryRecord& record);

/// Asks the backend to judge the trajectory; parses the Thoughts/Status
/// reply. Status accepts case and quote variations; a missing Thoughts block
/// is tolerated with a warning; a missing Status line is a VerdictParseError.
EvalVerdict evaluate_trajectory(const replay::TrajectoryRecord& record,
                                const chat::Gateway& gateway);

/// Parses a raw evaluator reply (exposed for tests).
EvalVerdict parse_verdict(const std::string& raw);

/// Ground truth from the fixture: success iff the outcome predicate held at
/// reset or after any recorded action, re-derived by replaying the action
/// log. Throws Error when the fixture is not the one replayed.
EvalVerdict oracle_evaluate(const replay::TrajectoryRecord& record,
                            const env::SiteFixture& fixture);

struct Confusion {
    uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    uint64_t total() const { return tp + fp + fn + tn; }
};

struct Alignment {
    double accuracy = 0.0;
    Confusion confusion;
};

/// Agreement between verdicts and boolean reference labels (true = success).
Alignment alignment(const std::vector<EvalVerdict>& verdicts, const std::vector<bool>& labels);

/// A deterministic stand-in evaluator for offline runs: answers the
/// evaluator prompt with success iff the transcript contains a done()
/// action, mirroring how a clean run ends.
class RuleEvaluatorBackend : public chat::ChatBackend {
  public:
    chat::ChatResult complete(const std::vector<chat::ChatMessage>& messages) override;
};

struct DatasetStats {
    uint64_t tutorials_replayed = 0;
    uint64_t trajectories_total = 0;
    uint64_t effective_count = 0;
    double success_rate = 0.0;
    double avg_steps = 0.0;  // over effective trajectories only
    std::map<std::string, uint64_t> per_category_counts;  // by target_type

    nlohmann::json to_json() const;
    std::string report_text() const;
};

/// Recomputes stats from a run directory. A trajectory is effective when a
/// stored verdict says success, falling back to its recorded outcome flag
/// when no verdict exists. An empty store yields zeroed stats.
DatasetStats dataset_stats(const store::RunStore& run);

DatasetStats dataset_stats_from_records(
    const std::vector<replay::TrajectoryRecord>& records,
    const std::map<std::string, bool>& verdict_by_task);

}  // namespace trailkit::eval
