#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace courttrack {

// Each command returns a process exit code; failures print to err and
// return 1 instead of throwing.

struct SimulateArgs {
  std::string config_path;
  std::string out_dir;  // receives gt.jsonl, scenario.jsonl, config.json
};
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);

struct TrackArgs {
  std::string detections_path;
  std::string out_path;
  std::string config_path;      // optional RunConfig JSON
  std::optional<double> alpha;  // wins over the two switches below
  bool no_appearance = false;   // alpha = 1, geometry only
  bool no_geometry = false;     // alpha = 0, appearance only
  bool no_regain = false;
  bool no_geometry_constraint = false;
};
int cmd_track(const TrackArgs& args, std::ostream& out, std::ostream& err);

struct EvalArgs {
  std::string gt_path;
  std::string pred_path;
  std::string json_out;  // optional report file; text always goes to out
  std::string config_path;
  std::optional<double> gate;
};
int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);

struct StatsArgs {
  std::string pred_path;
  int track_id = 0;
  std::string out_dir;  // receives stats.json, heatmap.csv, heatmap.pgm
  std::string config_path;
  double frame_rate = 10.0;
  int window = 5;
  double sprint_threshold = 6.0;
  double jog_threshold = 1.0;
  double cell = 0.5;
};
int cmd_stats(const StatsArgs& args, std::ostream& out, std::ostream& err);

struct PoseArgs {
  std::string pose_path;
  std::string ref_path;      // enables the 3D term
  std::string cameras_path;  // with pseudo2d_path, enables the 2D term
  std::string pseudo2d_path;
  std::vector<std::string> heatmap_metas;  // enable the uncertainty gate
  double lambda = 6.0;
  double l_min = 0.05;
  double l_max = 0.7;
  std::string out_path;  // optional report file; JSON always goes to out
};
int cmd_pose(const PoseArgs& args, std::ostream& out, std::ostream& err);

}  // namespace courttrack
