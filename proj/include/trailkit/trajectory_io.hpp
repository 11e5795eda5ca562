#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "trailkit/replay.hpp"
#include "trailkit/screen_actions.hpp"

namespace trailkit::store {

/// Canonical bytes: a "TRAJ1 <fnv64> <length>" header line, then the record
/// as JSON with sorted keys. Identical records serialize identically; a
/// flipped byte fails the checksum on read.
std::string serialize_trajectory(const replay::TrajectoryRecord& record);
replay::TrajectoryRecord deserialize_trajectory(const std::string& bytes);

nlohmann::json trajectory_to_json(const replay::TrajectoryRecord& record);
replay::TrajectoryRecord trajectory_from_json(const nlohmann::json& j);

/// One training sample per replay step that maps to screen gestures.
struct TrainingSample {
    std::string task_text;
    std::string observation_text;
    std::string screenshot_ref;
    std::string thought;
    std::vector<ScreenAction> screen_actions;
    std::string trajectory_id;
    size_t step_index = 0;
};

nlohmann::json sample_to_json(const TrainingSample& s);

/// Steps whose gesture list is empty (goto/done, parse failures) produce no
/// sample. Propagates MappingError with the step index.
std::vector<TrainingSample> postprocess(const replay::TrajectoryRecord& record);

/// Run-directory layout: trajectories/<task_id>.traj plus manifest.json.
/// Contents are deterministic for identical runs.
class RunStore {
  public:
    explicit RunStore(std::string run_dir) : run_dir_(std::move(run_dir)) {}

    const std::string& run_dir() const { return run_dir_; }

    void write_all(const std::vector<replay::TrajectoryRecord>& records) const;
    std::vector<replay::TrajectoryRecord> read_all() const;

    std::string trajectory_path(const std::string& task_id) const;
    std::string manifest_path() const;
    std::string verdicts_path() const;

  private:
    std::string run_dir_;
};

}  // namespace trailkit::store
