#include "courttrack/commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "courttrack/io.hpp"

namespace courttrack {

namespace {

namespace fs = std::filesystem;

nlohmann::json load_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  is >> j;
  return j;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return is;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  return os;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os = open_out(path);
  os << text;
  os.close();
  if (!os) throw std::runtime_error("failed writing " + path);
}

RunConfig load_run_config(const std::string& path) {
  if (path.empty()) return RunConfig{};
  return run_config_from_json(load_json(path));
}

}  // namespace

int cmd_simulate(const SimulateArgs& args, std::ostream& out,
                 std::ostream& err) {
  try {
    const ScenarioConfig config = scenario_from_json(load_json(args.config_path));
    const GroundTruth gt = generate(config);
    const std::vector<FrameInput> detections = render_detections(gt, config);

    fs::create_directories(args.out_dir);
    const fs::path dir(args.out_dir);
    {
      std::ofstream os = open_out((dir / "gt.jsonl").string());
      write_labeled_jsonl(os, gt.frames);
    }
    {
      std::ofstream os = open_out((dir / "scenario.jsonl").string());
      write_detections_jsonl(os, detections);
    }
    write_text((dir / "config.json").string(),
               scenario_to_json(config).dump(2) + "\n");

    long n_detections = 0;
    for (const FrameInput& f : detections) n_detections += f.detections.size();
    out << "frames=" << gt.frames.size() << " agents=" << config.agents.size()
        << " detections=" << n_detections << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "simulate: " << e.what() << '\n';
    return 1;
  }
}

int cmd_track(const TrackArgs& args, std::ostream& out, std::ostream& err) {
  try {
    RunConfig config = load_run_config(args.config_path);
    if (args.no_appearance && args.no_geometry)
      throw std::runtime_error("--no-appearance conflicts with --no-geometry");
    if (args.no_appearance) config.tracker.alpha = 1.0;
    if (args.no_geometry) config.tracker.alpha = 0.0;
    if (args.alpha) config.tracker.alpha = *args.alpha;
    if (args.no_regain) config.tracker.enable_regain = false;
    if (args.no_geometry_constraint)
      config.tracker.enable_geometry_constraint = false;
    config.tracker.validate();

    std::ifstream is = open_in(args.detections_path);
    const std::vector<FrameInput> frames = read_detections_jsonl(is);
    const TrajectorySet result = run_tracker(config.tracker, frames);

    std::ofstream os = open_out(args.out_path);
    write_trajectories_jsonl(os, result);
    os.close();
    if (!os) throw std::runtime_error("failed writing " + args.out_path);

    out << "frames=" << result.frames.size() << " tracks=" << result.tracks.size()
        << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "track: " << e.what() << '\n';
    return 1;
  }
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig config = load_run_config(args.config_path);
    const double gate = args.gate ? *args.gate : config.metric_gate;

    std::ifstream gs = open_in(args.gt_path);
    const std::vector<LabeledFrame> gt = read_labeled_jsonl(gs);
    std::ifstream ps = open_in(args.pred_path);
    const std::vector<LabeledFrame> pred = read_labeled_jsonl(ps);

    const MetricsReport report = evaluate(gt, pred, gate);
    out << report_to_text(report);
    if (!args.json_out.empty())
      write_text(args.json_out, report_to_json(report).dump(2) + "\n");
    return 0;
  } catch (const std::exception& e) {
    err << "eval: " << e.what() << '\n';
    return 1;
  }
}

int cmd_stats(const StatsArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig config = load_run_config(args.config_path);

    std::ifstream is = open_in(args.pred_path);
    const std::vector<LabeledFrame> frames = read_labeled_jsonl(is);
    std::vector<Eigen::Vector3d> positions;
    for (const LabeledFrame& f : frames)
      for (const LabeledBox& ob : f.objects)
        if (ob.id == args.track_id) positions.push_back(ob.box.center);
    if (positions.empty())
      throw std::runtime_error("track " + std::to_string(args.track_id) +
                               " not found in " + args.pred_path);

    const PlayerStats stats =
        player_stats(positions, 1.0 / args.frame_rate, args.window,
                     args.sprint_threshold, args.jog_threshold);
    const HeatmapGrid grid =
        occupancy_heatmap(positions, config.tracker.field, args.cell);

    fs::create_directories(args.out_dir);
    const fs::path dir(args.out_dir);
    const std::string stats_json = stats_to_json(stats, args.track_id).dump(2) + "\n";
    write_text((dir / "stats.json").string(), stats_json);
    {
      std::ofstream os = open_out((dir / "heatmap.csv").string());
      write_heatmap_csv(grid, os);
    }
    {
      std::ofstream os = open_out((dir / "heatmap.pgm").string());
      write_heatmap_pgm(grid, os);
    }
    out << stats_json;
    return 0;
  } catch (const std::exception& e) {
    err << "stats: " << e.what() << '\n';
    return 1;
  }
}

int cmd_pose(const PoseArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const Pose3D pose = pose_from_json(load_json(args.pose_path));
    const SkeletonDef skeleton = SkeletonDef::coco17();

    double loss_3d = 0.0;
    if (!args.ref_path.empty())
      loss_3d = pose_l1(pose, pose_from_json(load_json(args.ref_path)));

    double loss_2d = 0.0;
    if (!args.cameras_path.empty() || !args.pseudo2d_path.empty()) {
      if (args.cameras_path.empty() || args.pseudo2d_path.empty())
        throw std::runtime_error("--cameras and --pseudo2d must be given together");
      loss_2d = l2d(pose, cameras_from_json(load_json(args.cameras_path)),
                    pseudo2d_from_json(load_json(args.pseudo2d_path)));
    }

    const PriorLosses prior = prior_losses(pose, skeleton, args.l_min, args.l_max);

    bool accepted = true;
    std::optional<double> uncertainty;
    if (!args.heatmap_metas.empty()) {
      std::vector<Heatmap3D> heatmaps;
      for (const std::string& meta : args.heatmap_metas)
        heatmaps.push_back(normalize(read_heatmap(meta)));
      uncertainty = person_uncertainty(heatmaps);
      accepted = accept_pose(*uncertainty, args.lambda);
    }

    const double total = unsup_loss(loss_2d, loss_3d, prior.total, accepted);

    nlohmann::json report{
        {"v", kSchemaVersion},
        {"l2d", json_num(loss_2d)},
        {"l3d", json_num(loss_3d)},
        {"prior",
         {{"length", json_num(prior.length)},
          {"symm", json_num(prior.symm)},
          {"angle", json_num(prior.angle)},
          {"total", json_num(prior.total)},
          {"degenerate_forward", prior.degenerate_forward}}},
        {"uncertainty", uncertainty ? json_num(*uncertainty) : nlohmann::json()},
        {"lambda", json_num(args.lambda)},
        {"accepted", accepted},
        {"unsup", json_num(total)}};
    const std::string text = report.dump(2) + "\n";
    out << text;
    if (!args.out_path.empty()) write_text(args.out_path, text);
    return 0;
  } catch (const std::exception& e) {
    err << "pose: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace courttrack
