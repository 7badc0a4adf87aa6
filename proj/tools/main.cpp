#include <iostream>

#include <CLI11.hpp>

#include "courttrack/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"multi-object tracking over simulated court scenarios"};
  app.require_subcommand(1);

  courttrack::SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "generate ground truth and detections from a scenario config");
  simulate->add_option("--config", sim.config_path, "scenario JSON")->required();
  simulate->add_option("--out", sim.out_dir, "output directory")->required();

  courttrack::TrackArgs trk;
  CLI::App* track =
      app.add_subcommand("track", "link a detections stream into trajectories");
  track->add_option("--detections", trk.detections_path, "detections JSONL")
      ->required();
  track->add_option("--out", trk.out_path, "trajectories JSONL")->required();
  track->add_option("--config", trk.config_path, "run config JSON");
  double alpha = 0.0;
  CLI::Option* alpha_opt = track->add_option(
      "--alpha", alpha, "geometry weight in the fused affinity");
  track->add_flag("--no-appearance", trk.no_appearance, "geometry only (alpha 1)");
  track->add_flag("--no-geometry", trk.no_geometry, "appearance only (alpha 0)");
  track->add_flag("--no-regain", trk.no_regain, "disable trajectory regain");
  track->add_flag("--no-geometry-constraint", trk.no_geometry_constraint,
                  "regain without exit-edge / radius constraints");

  courttrack::EvalArgs ev;
  CLI::App* eval =
      app.add_subcommand("eval", "score trajectories against ground truth");
  eval->add_option("--gt", ev.gt_path, "ground-truth JSONL")->required();
  eval->add_option("--pred", ev.pred_path, "trajectories JSONL")->required();
  eval->add_option("--json", ev.json_out, "also write a JSON report here");
  eval->add_option("--config", ev.config_path, "run config JSON");
  double gate = 0.0;
  CLI::Option* gate_opt =
      eval->add_option("--gate", gate, "match gate for the CLEAR metrics");

  courttrack::StatsArgs st;
  CLI::App* stats =
      app.add_subcommand("stats", "per-player statistics and position heatmap");
  stats->add_option("--pred", st.pred_path, "trajectories JSONL")->required();
  stats->add_option("--track", st.track_id, "track id")->required();
  stats->add_option("--out", st.out_dir, "output directory")->required();
  stats->add_option("--config", st.config_path, "run config JSON");
  stats->add_option("--frame-rate", st.frame_rate, "frames per second");
  stats->add_option("--window", st.window, "speed smoothing window (odd)");
  stats->add_option("--sprint", st.sprint_threshold, "sprint threshold m/s");
  stats->add_option("--jog", st.jog_threshold, "jog threshold m/s");
  stats->add_option("--cell", st.cell, "heatmap cell size m");

  courttrack::PoseArgs ps;
  CLI::App* pose =
      app.add_subcommand("pose", "pose plausibility losses and pseudo-label gate");
  pose->add_option("--pose", ps.pose_path, "pose JSON")->required();
  pose->add_option("--ref", ps.ref_path, "reference pose JSON for the 3D term");
  pose->add_option("--cameras", ps.cameras_path, "camera list JSON");
  pose->add_option("--pseudo2d", ps.pseudo2d_path, "per-view 2D labels JSON");
  pose->add_option("--heatmaps", ps.heatmap_metas,
                   "heatmap sidecar JSONs for the uncertainty gate");
  pose->add_option("--lambda", ps.lambda, "entropy acceptance threshold");
  pose->add_option("--l-min", ps.l_min, "minimum bone length m");
  pose->add_option("--l-max", ps.l_max, "maximum bone length m");
  pose->add_option("--out", ps.out_path, "also write the report here");

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed())
    return courttrack::cmd_simulate(sim, std::cout, std::cerr);
  if (track->parsed()) {
    if (alpha_opt->count() > 0) trk.alpha = alpha;
    return courttrack::cmd_track(trk, std::cout, std::cerr);
  }
  if (eval->parsed()) {
    if (gate_opt->count() > 0) ev.gate = gate;
    return courttrack::cmd_eval(ev, std::cout, std::cerr);
  }
  if (stats->parsed()) return courttrack::cmd_stats(st, std::cout, std::cerr);
  if (pose->parsed()) return courttrack::cmd_pose(ps, std::cout, std::cerr);
  return 1;
}
