#include "trailkit/trajectory_io.hpp"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "trailkit/errors.hpp"
#include "trailkit/hash.hpp"

namespace trailkit::store {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json observation_to_json(const env::Observation& obs) {
    json j{{"url", obs.url},
           {"axtree_text", obs.axtree_text},
           {"screenshot_ref", obs.screenshot_ref}};
    if (obs.last_action_error) j["last_action_error"] = *obs.last_action_error;
    return j;
}

env::Observation observation_from_json(const json& j) {
    env::Observation obs;
    obs.url = j.at("url").get<std::string>();
    obs.axtree_text = j.at("axtree_text").get<std::string>();
    obs.screenshot_ref = j.at("screenshot_ref").get<std::string>();
    if (j.contains("last_action_error"))
        obs.last_action_error = j["last_action_error"].get<std::string>();
    return obs;
}

}  // namespace

json trajectory_to_json(const replay::TrajectoryRecord& record) {
    json steps = json::array();
    for (const replay::TrajectoryStep& s : record.steps) {
        json sj{{"observation", observation_to_json(s.observation)},
                {"inner_thought", s.inner_thought},
                {"action_text", s.action_text},
                {"duration_us", s.duration_us}};
        if (s.action) sj["action"] = env::render_action(*s.action);
        if (s.element_detail)
            sj["element_detail"] = json{{"bid", s.element_detail->bid},
                                        {"role", s.element_detail->role},
                                        {"name", s.element_detail->name},
                                        {"center_x", s.element_detail->center_x},
                                        {"center_y", s.element_detail->center_y}};
        steps.push_back(std::move(sj));
    }
    return json{{"version", 1},
                {"task_id", record.task_id},
                {"site_id", record.site_id},
                {"start_url", record.start_url},
                {"guidance", record.guidance},
                {"seed", record.seed},
                {"tutorial", tutorial::tutorial_to_json(record.tutorial)},
                {"steps", steps},
                {"final_status", replay::final_status_name(record.final_status)},
                {"outcome_reached", record.outcome_reached},
                {"usage",
                 json{{"prompt_tokens", record.usage.prompt_tokens},
                      {"completion_tokens", record.usage.completion_tokens}}}};
}

replay::TrajectoryRecord trajectory_from_json(const json& j) {
    if (j.value("version", 0) != 1)
        throw StoreError("unsupported trajectory version " +
                         std::to_string(j.value("version", 0)));
    replay::TrajectoryRecord record;
    record.task_id = j.at("task_id").get<std::string>();
    record.site_id = j.at("site_id").get<std::string>();
    record.start_url = j.at("start_url").get<std::string>();
    record.guidance = j.at("guidance").get<std::string>();
    record.seed = j.at("seed").get<uint64_t>();
    record.tutorial = tutorial::parse_tutorial(j.at("tutorial").dump()).tutorial;
    for (const auto& sj : j.at("steps")) {
        replay::TrajectoryStep s;
        s.observation = observation_from_json(sj.at("observation"));
        s.inner_thought = sj.at("inner_thought").get<std::string>();
        s.action_text = sj.at("action_text").get<std::string>();
        s.duration_us = sj.value("duration_us", 0ll);
        if (sj.contains("action")) s.action = env::parse_action(sj["action"].get<std::string>());
        if (sj.contains("element_detail")) {
            const json& ej = sj["element_detail"];
            s.element_detail =
                replay::ElementDetail{ej.at("bid").get<int>(), ej.at("role").get<std::string>(),
                                      ej.at("name").get<std::string>(),
                                      ej.at("center_x").get<int>(), ej.at("center_y").get<int>()};
        }
        record.steps.push_back(std::move(s));
    }
    record.final_status =
        replay::final_status_from_string(j.at("final_status").get<std::string>());
    record.outcome_reached = j.at("outcome_reached").get<bool>();
    record.usage.prompt_tokens = j.at("usage").at("prompt_tokens").get<uint64_t>();
    record.usage.completion_tokens = j.at("usage").at("completion_tokens").get<uint64_t>();
    record.usage.phase = chat::Phase::replay;
    return record;
}

std::string serialize_trajectory(const replay::TrajectoryRecord& record) {
    const std::string payload = trajectory_to_json(record).dump();
    return "TRAJ1 " + to_hex(fnv1a64(payload)) + " " + std::to_string(payload.size()) + "\n" +
           payload;
}

replay::TrajectoryRecord deserialize_trajectory(const std::string& bytes) {
    const size_t eol = bytes.find('\n');
    if (eol == std::string::npos || bytes.rfind("TRAJ1 ", 0) != 0)
        throw StoreError("not a trajectory record (missing TRAJ1 header)");
    const std::string header = bytes.substr(0, eol);
    const size_t sp1 = header.find(' ');
    const size_t sp2 = header.find(' ', sp1 + 1);
    if (sp2 == std::string::npos) throw StoreError("malformed trajectory header");
    const std::string checksum = header.substr(sp1 + 1, sp2 - sp1 - 1);
    const size_t declared = std::stoull(header.substr(sp2 + 1));
    const std::string payload = bytes.substr(eol + 1);
    if (payload.size() != declared)
        throw StoreError("trajectory payload length mismatch");
    if (to_hex(fnv1a64(payload)) != checksum)
        throw StoreError("trajectory checksum mismatch (corrupt payload)");
    try {
        return trajectory_from_json(json::parse(payload));
    } catch (const json::exception& e) {
        throw StoreError(std::string("malformed trajectory payload: ") + e.what());
    }
}

json sample_to_json(const TrainingSample& s) {
    json gestures = json::array();
    for (const ScreenAction& a : s.screen_actions) gestures.push_back(screen_action_to_json(a));
    return json{{"task_text", s.task_text},
                {"observation_text", s.observation_text},
                {"screenshot_ref", s.screenshot_ref},
                {"thought", s.thought},
                {"screen_actions", gestures},
                {"source", json{{"trajectory_id", s.trajectory_id}, {"step_index", s.step_index}}}};
}

std::vector<TrainingSample> postprocess(const replay::TrajectoryRecord& record) {
    std::vector<TrainingSample> samples;
    for (size_t i = 0; i < record.steps.size(); ++i) {
        const replay::TrajectoryStep& step = record.steps[i];
        if (!step.action) continue;  // parse failure recorded for analysis only
        std::vector<ScreenAction> gestures;
        try {
            gestures = map_action(*step.action, step.element_detail);
        } catch (const MappingError& e) {
            throw MappingError(std::string(e.what()) + " (step " + std::to_string(i) + ")");
        }
        if (gestures.empty()) continue;
        TrainingSample s;
        s.task_text = record.tutorial.task_description;
        s.observation_text = step.observation.axtree_text;
        s.screenshot_ref = step.observation.screenshot_ref;
        s.thought = step.inner_thought;
        s.screen_actions = std::move(gestures);
        s.trajectory_id = record.task_id;
        s.step_index = i;
        samples.push_back(std::move(s));
    }
    return samples;
}

std::string RunStore::trajectory_path(const std::string& task_id) const {
    return (fs::path(run_dir_) / "trajectories" / (task_id + ".traj")).string();
}

std::string RunStore::manifest_path() const {
    return (fs::path(run_dir_) / "manifest.json").string();
}

std::string RunStore::verdicts_path() const {
    return (fs::path(run_dir_) / "verdicts.jsonl").string();
}

void RunStore::write_all(const std::vector<replay::TrajectoryRecord>& records) const {
    fs::create_directories(fs::path(run_dir_) / "trajectories");
    json manifest{{"version", 1}, {"trajectories", json::array()}};
    for (const replay::TrajectoryRecord& record : records) {
        const std::string path = trajectory_path(record.task_id);
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw StoreError("cannot write trajectory: " + path);
        f << serialize_trajectory(record);
        manifest["trajectories"].push_back(
            json{{"task_id", record.task_id},
                 {"file", "trajectories/" + record.task_id + ".traj"},
                 {"final_status", replay::final_status_name(record.final_status)},
                 {"outcome_reached", record.outcome_reached},
                 {"steps", record.steps.size()}});
    }
    std::ofstream mf(manifest_path(), std::ios::trunc);
    if (!mf) throw StoreError("cannot write manifest: " + manifest_path());
    mf << manifest.dump(2) << '\n';
}

std::vector<replay::TrajectoryRecord> RunStore::read_all() const {
    std::ifstream mf(manifest_path());
    if (!mf) throw StoreError("no manifest in run directory: " + run_dir_);
    json manifest;
    try {
        mf >> manifest;
    } catch (const json::exception& e) {
        throw StoreError(std::string("malformed manifest: ") + e.what());
    }
    std::vector<replay::TrajectoryRecord> records;
    for (const auto& entry : manifest.at("trajectories")) {
        const std::string path =
            (fs::path(run_dir_) / entry.at("file").get<std::string>()).string();
        std::ifstream f(path, std::ios::binary);
        if (!f) throw StoreError("missing trajectory file: " + path);
        std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
        records.push_back(deserialize_trajectory(bytes));
    }
    return records;
}

}  // namespace trailkit::store
