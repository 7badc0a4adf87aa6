#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "courttrack/analytics.hpp"
#include "courttrack/metrics.hpp"
#include "courttrack/pose_prior.hpp"
#include "courttrack/simulator.hpp"
#include "courttrack/tracker.hpp"

namespace courttrack {

inline constexpr int kSchemaVersion = 1;

// Quantizes to 9 significant digits so serialized floats are identical
// across platforms. Throws std::invalid_argument on non-finite input.
nlohmann::json json_num(double x);

nlohmann::json box_to_json(const Box3D& box);
Box3D box_from_json(const nlohmann::json& j);

// detections stream: one frame per line,
// {"detections":[{"box":{"c":[..],"d":[..],"yaw":..},"conf":..,
//   "features":[{"valid":..,"vec":[..],"view":..}]}],"frame":..,"v":1}
void write_detections_jsonl(std::ostream& os,
                            const std::vector<FrameInput>& frames);
std::vector<FrameInput> read_detections_jsonl(std::istream& is);

// labeled stream (ground truth or tracker output): one frame per line,
// {"frame":..,"objects":[{"box":{..},"id":..}],"v":1}; tracker output adds
// "interp":true on gap-filled objects, which read_labeled_jsonl ignores
void write_labeled_jsonl(std::ostream& os,
                         const std::vector<LabeledFrame>& frames);
void write_trajectories_jsonl(std::ostream& os, const TrajectorySet& result);
std::vector<LabeledFrame> read_labeled_jsonl(std::istream& is);

nlohmann::json scenario_to_json(const ScenarioConfig& config);
ScenarioConfig scenario_from_json(const nlohmann::json& j);

// every tracking/eval knob in one round-trippable bundle
struct RunConfig {
  TrackerConfig tracker;
  double metric_gate = 0.25;
  double occlusion_iou = 0.3;
};

nlohmann::json run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const MetricsReport& report);
std::string report_to_text(const MetricsReport& report);

nlohmann::json stats_to_json(const PlayerStats& stats, int track_id);

nlohmann::json pose_to_json(const Pose3D& pose);
Pose3D pose_from_json(const nlohmann::json& j);

nlohmann::json cameras_to_json(const std::vector<CameraModel>& cams);
std::vector<CameraModel> cameras_from_json(const nlohmann::json& j);

// per-view pseudo 2D labels: {"v":1,"views":[[[u,v] or null per joint]..]}
nlohmann::json pseudo2d_to_json(
    const std::vector<std::vector<std::pair<Eigen::Vector2d, bool>>>& views);
std::vector<std::vector<std::pair<Eigen::Vector2d, bool>>> pseudo2d_from_json(
    const nlohmann::json& j);

// grid values as little-endian float32 in storage order (x-major), plus a
// JSON sidecar {"data":<file>,"dims":[X,Y,Z],"dtype":"f32le",...}; the data
// path in the sidecar is relative to the sidecar's directory
void write_heatmap(const std::string& meta_path, const std::string& data_path,
                   const Heatmap3D& h);
Heatmap3D read_heatmap(const std::string& meta_path);

}  // namespace courttrack
