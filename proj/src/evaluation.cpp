#include "trailkit/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "trailkit/errors.hpp"
#include "trailkit/prompts.hpp"

namespace trailkit::eval {

using nlohmann::json;

json verdict_to_json(const EvalVerdict& v, const std::string& task_id) {
    return json{{"task_id", task_id},
                {"status", v.success() ? "success" : "failure"},
                {"thoughts", v.thoughts},
                {"source", v.source == VerdictSource::llm ? "llm" : "oracle"},
                {"warnings", v.warnings}};
}

std::string render_transcript(const replay::TrajectoryRecord& record) {
    std::string out = "{" + record.tutorial.task_description;
    for (const replay::TrajectoryStep& step : record.steps) {
        out += "; ";
        out += step.inner_thought;
        out += "; ";
        out += step.action ? env::render_action(*step.action) : step.action_text;
    }
    out += "}";
    return out;
}

std::vector<chat::ChatMessage> build_evaluator_messages(const replay::TrajectoryRecord& record) {
    std::string user = prompts::substitute(prompts::kEvaluatorUserTemplate, "task_des",
                                           record.tutorial.task_description);
    user = prompts::substitute(user, "trajectory", render_transcript(record));
    return {{chat::Role::system, std::string(prompts::kEvaluatorSystem)},
            {chat::Role::user, std::move(user)}};
}

namespace {

std::string trim(std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool istarts_with(const std::string& line, const char* prefix) {
    return lower(line).rfind(prefix, 0) == 0;
}

}  // namespace

EvalVerdict parse_verdict(const std::string& raw) {
    EvalVerdict v;
    v.source = VerdictSource::llm;

    std::vector<std::string> lines;
    {
        std::istringstream in(raw);
        std::string line;
        while (std::getline(in, line)) lines.push_back(line);
    }

    bool found_status = false;
    std::string thoughts;
    bool in_thoughts = false;
    for (const std::string& line : lines) {
        if (istarts_with(line, "status:")) {
            in_thoughts = false;
            std::string token = trim(line.substr(7));
            // quotes optional, token case-insensitive, trailing period tolerated
            while (!token.empty() && (token.front() == '"' || token.front() == '\''))
                token.erase(token.begin());
            while (!token.empty() &&
                   (token.back() == '"' || token.back() == '\'' || token.back() == '.'))
                token.pop_back();
            const std::string k = lower(token);
            if (k == "success") {
                v.status = VerdictStatus::success;
                found_status = true;
            } else if (k == "failure") {
                v.status = VerdictStatus::failure;
                found_status = true;
            } else {
                throw VerdictParseError("unrecognized status token: " + token, raw);
            }
        } else if (istarts_with(line, "thoughts:")) {
            thoughts = trim(line.substr(9));
            in_thoughts = true;
        } else if (in_thoughts) {
            thoughts += (thoughts.empty() ? "" : "\n") + line;
        }
    }
    if (!found_status) throw VerdictParseError("response has no Status line", raw);
    v.thoughts = trim(thoughts);
    if (v.thoughts.empty()) v.warnings.push_back("empty thoughts");
    return v;
}

EvalVerdict evaluate_trajectory(const replay::TrajectoryRecord& record,
                                const chat::Gateway& gateway) {
    auto result = gateway.call(build_evaluator_messages(record));
    return parse_verdict(result.content);
}

EvalVerdict oracle_evaluate(const replay::TrajectoryRecord& record,
                            const env::SiteFixture& fixture) {
    if (record.site_id != fixture.site_id)
        throw Error("fixture mismatch: trajectory was replayed on '" + record.site_id +
                    "', not '" + fixture.site_id + "'");
    EvalVerdict v;
    v.source = VerdictSource::oracle;

    // No hidden state: replaying the recorded actions reproduces the run.
    auto [state, obs] = env::reset_at(fixture, record.start_url);
    bool reached = env::check_outcome(state, fixture);
    int reached_at = reached ? 0 : -1;
    int executed = 0;
    for (const replay::TrajectoryStep& step : record.steps) {
        if (!step.action) break;  // parse failure ended the recording
        auto [next_state, next_obs] = env::step(std::move(state), *step.action);
        state = std::move(next_state);
        ++executed;
        if (!reached && env::check_outcome(state, fixture)) {
            reached = true;
            reached_at = executed;
        }
    }
    v.status = reached ? VerdictStatus::success : VerdictStatus::failure;
    v.thoughts = reached
                     ? (reached_at == 0 ? "Outcome predicate already satisfied at the initial state."
                                        : "Outcome predicate satisfied after action " +
                                              std::to_string(reached_at) + " of " +
                                              std::to_string(executed) + ".")
                     : "Outcome predicate never satisfied across " + std::to_string(executed) +
                           " actions.";
    return v;
}

Alignment alignment(const std::vector<EvalVerdict>& verdicts, const std::vector<bool>& labels) {
    if (verdicts.empty()) throw Error("alignment: empty verdict list");
    if (verdicts.size() != labels.size())
        throw Error("alignment: verdicts and labels differ in length");
    Alignment a;
    for (size_t i = 0; i < verdicts.size(); ++i) {
        const bool predicted = verdicts[i].success();
        if (predicted && labels[i]) ++a.confusion.tp;
        else if (predicted && !labels[i]) ++a.confusion.fp;
        else if (!predicted && labels[i]) ++a.confusion.fn;
        else ++a.confusion.tn;
    }
    a.accuracy = static_cast<double>(a.confusion.tp + a.confusion.tn) /
                 static_cast<double>(a.confusion.total());
    return a;
}

chat::ChatResult RuleEvaluatorBackend::complete(const std::vector<chat::ChatMessage>& messages) {
    std::string transcript;
    for (const chat::ChatMessage& m : messages) {
        if (m.role != chat::Role::user) continue;
        const size_t pos = m.content.find("trajectory: ");
        if (pos != std::string::npos) transcript = m.content.substr(pos + 12);
    }
    const bool finished = transcript.find("; done(") != std::string::npos;
    std::string content =
        finished ? "Thoughts: The agent worked through the steps and declared the task "
                   "finished; the trajectory reads as effective.\nStatus: \"success\""
                 : "Thoughts: The agent never declared the task finished; the trajectory "
                   "trails off without completing the goal.\nStatus: \"failure\"";
    chat::ChatResult result;
    result.content = std::move(content);
    for (const chat::ChatMessage& m : messages)
        result.usage.prompt_tokens += chat::word_count(m.content);
    result.usage.completion_tokens = chat::word_count(result.content);
    return result;
}

json DatasetStats::to_json() const {
    return json{{"size", trajectories_total},
                {"tutorials_replayed", tutorials_replayed},
                {"effective_count", effective_count},
                {"success_rate", success_rate},
                {"average_steps", avg_steps},
                {"per_category_counts", per_category_counts}};
}

std::string DatasetStats::report_text() const {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "size=%llu effective=%llu success_rate=%.4f average_steps=%.2f",
                  static_cast<unsigned long long>(trajectories_total),
                  static_cast<unsigned long long>(effective_count), success_rate, avg_steps);
    std::string out = buf;
    for (const auto& [category, count] : per_category_counts)
        out += "\n  " + category + ": " + std::to_string(count);
    return out;
}

DatasetStats dataset_stats_from_records(const std::vector<replay::TrajectoryRecord>& records,
                                        const std::map<std::string, bool>& verdict_by_task) {
    DatasetStats stats;
    stats.tutorials_replayed = records.size();
    stats.trajectories_total = records.size();
    uint64_t effective_steps = 0;
    for (const replay::TrajectoryRecord& r : records) {
        const auto it = verdict_by_task.find(r.task_id);
        const bool effective = it != verdict_by_task.end() ? it->second : r.outcome_reached;
        if (effective) {
            ++stats.effective_count;
            effective_steps += r.steps.size();
        }
        ++stats.per_category_counts[tutorial::target_type_name(r.tutorial.target_type)];
    }
    if (stats.trajectories_total > 0)
        stats.success_rate = static_cast<double>(stats.effective_count) /
                             static_cast<double>(stats.trajectories_total);
    if (stats.effective_count > 0)
        stats.avg_steps =
            static_cast<double>(effective_steps) / static_cast<double>(stats.effective_count);
    return stats;
}

DatasetStats dataset_stats(const store::RunStore& run) {
    std::vector<replay::TrajectoryRecord> records;
    try {
        records = run.read_all();
    } catch (const StoreError&) {
        return {};  // empty or missing store: zeroed stats
    }
    std::map<std::string, bool> verdict_by_task;
    std::ifstream vf(run.verdicts_path());
    if (vf) {
        std::string line;
        while (std::getline(vf, line)) {
            if (line.empty()) continue;
            try {
                json j = json::parse(line);
                verdict_by_task[j.at("task_id").get<std::string>()] =
                    j.at("status").get<std::string>() == "success";
            } catch (const json::exception&) {
                continue;  // skip malformed verdict lines
            }
        }
    }
    return dataset_stats_from_records(records, verdict_by_task);
}

}  // namespace trailkit::eval
