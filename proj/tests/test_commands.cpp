#include "courttrack/commands.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "courttrack/io.hpp"

namespace courttrack {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  EXPECT_TRUE(is.good()) << p;
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  os << text;
}

ScenarioConfig demo_scenario() {
  ScenarioConfig c;
  c.seed = 11;
  c.duration = 3.0;
  c.frame_rate = 10.0;
  c.embedding_dim = 16;
  c.noise.pos_sigma = 0.02;
  c.noise.feat_sigma = 0.05;
  c.noise.dropout = 0.0;
  AgentScript a;
  a.waypoints = {{5.0, 7.0}, {23.0, 7.0}};
  a.speeds = {2.0};
  AgentScript b;
  b.waypoints = {{23.0, 8.0}, {5.0, 8.0}};
  b.speeds = {2.0};
  AgentScript s;
  s.waypoints = {{14.0, 3.0}};
  s.speeds = {1.0};
  c.agents = {a, b, s};
  c.cameras = {make_lookat_camera({14, -10, 6}, {14, 7.5, 1}, 500, 500, 640, 480)};
  return c;
}

Pose3D upright_pose() {
  Pose3D p;
  p.joints = {
      {-0.05, 0.00, 1.65},                        // nose
      {-0.02, 0.04, 1.72},  {-0.02, -0.04, 1.72},  // eyes
      {-0.06, 0.08, 1.70},  {-0.06, -0.08, 1.70},  // ears
      {0.00, 0.20, 1.50},   {0.00, -0.20, 1.50},   // shoulders
      {0.00, 0.25, 1.20},   {0.00, -0.25, 1.20},   // elbows
      {0.00, 0.25, 0.93},   {0.00, -0.25, 0.93},   // wrists
      {0.00, 0.15, 1.00},   {0.00, -0.15, 1.00},   // hips
      {0.03, 0.15, 0.55},   {0.03, -0.15, 0.55},   // knees
      {0.00, 0.15, 0.10},   {0.00, -0.15, 0.10},   // ankles
  };
  return p;
}

class CommandsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::path(::testing::TempDir()) /
           (std::string("cmd_") + info->name() + "_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int simulate(const fs::path& out_dir) {
    spit(dir_ / "config.json", scenario_to_json(demo_scenario()).dump());
    SimulateArgs args;
    args.config_path = (dir_ / "config.json").string();
    args.out_dir = out_dir.string();
    return cmd_simulate(args, out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CommandsTest, SimulateWritesTheSceneBundle) {
  ASSERT_EQ(simulate(dir_ / "sim"), 0) << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "sim" / "gt.jsonl"));
  EXPECT_TRUE(fs::exists(dir_ / "sim" / "scenario.jsonl"));
  EXPECT_TRUE(fs::exists(dir_ / "sim" / "config.json"));
  EXPECT_NE(out_.str().find("frames=30"), std::string::npos);
  EXPECT_NE(out_.str().find("agents=3"), std::string::npos);

  std::ifstream gs(dir_ / "sim" / "gt.jsonl");
  EXPECT_EQ(read_labeled_jsonl(gs).size(), 30u);
}

TEST_F(CommandsTest, SimulateIsDeterministic) {
  ASSERT_EQ(simulate(dir_ / "a"), 0) << err_.str();
  ASSERT_EQ(simulate(dir_ / "b"), 0) << err_.str();
  EXPECT_EQ(slurp(dir_ / "a" / "gt.jsonl"), slurp(dir_ / "b" / "gt.jsonl"));
  EXPECT_EQ(slurp(dir_ / "a" / "scenario.jsonl"),
            slurp(dir_ / "b" / "scenario.jsonl"));
}

TEST_F(CommandsTest, TrackThenEvalProducesSaneMetrics) {
  ASSERT_EQ(simulate(dir_ / "sim"), 0) << err_.str();

  TrackArgs targs;
  targs.detections_path = (dir_ / "sim" / "scenario.jsonl").string();
  targs.out_path = (dir_ / "pred.jsonl").string();
  ASSERT_EQ(cmd_track(targs, out_, err_), 0) << err_.str();
  EXPECT_NE(out_.str().find("tracks="), std::string::npos);

  // same inputs, same output bytes
  TrackArgs again = targs;
  again.out_path = (dir_ / "pred2.jsonl").string();
  ASSERT_EQ(cmd_track(again, out_, err_), 0) << err_.str();
  EXPECT_EQ(slurp(dir_ / "pred.jsonl"), slurp(dir_ / "pred2.jsonl"));

  EvalArgs eargs;
  eargs.gt_path = (dir_ / "sim" / "gt.jsonl").string();
  eargs.pred_path = (dir_ / "pred.jsonl").string();
  eargs.json_out = (dir_ / "report.json").string();
  std::ostringstream eval_out;
  ASSERT_EQ(cmd_eval(eargs, eval_out, err_), 0) << err_.str();
  EXPECT_NE(eval_out.str().find("MOTA="), std::string::npos);
  EXPECT_NE(eval_out.str().find("HOTA="), std::string::npos);

  const nlohmann::json report = nlohmann::json::parse(slurp(dir_ / "report.json"));
  EXPECT_EQ(report["v"], 1);
  // a low-noise scene with three well-separated agents tracks cleanly
  EXPECT_GT(report["clear"]["mota"].get<double>(), 0.5);
  EXPECT_GT(report["hota"]["hota"].get<double>(), 0.5);
  EXPECT_EQ(report["clear"]["id_switches"].get<int>(), 0);
}

TEST_F(CommandsTest, TrackRejectsConflictingAblations) {
  TrackArgs args;
  args.detections_path = "unused.jsonl";
  args.out_path = (dir_ / "pred.jsonl").string();
  args.no_appearance = true;
  args.no_geometry = true;
  EXPECT_EQ(cmd_track(args, out_, err_), 1);
  EXPECT_NE(err_.str().find("conflicts"), std::string::npos);
}

TEST_F(CommandsTest, MissingInputsFailWithExitCodeOne) {
  SimulateArgs sargs;
  sargs.config_path = (dir_ / "absent.json").string();
  sargs.out_dir = (dir_ / "sim").string();
  EXPECT_EQ(cmd_simulate(sargs, out_, err_), 1);
  EXPECT_NE(err_.str().find("simulate:"), std::string::npos);

  TrackArgs targs;
  targs.detections_path = (dir_ / "absent.jsonl").string();
  targs.out_path = (dir_ / "pred.jsonl").string();
  EXPECT_EQ(cmd_track(targs, out_, err_), 1);
  EXPECT_NE(err_.str().find("cannot open"), std::string::npos);

  EvalArgs eargs;
  eargs.gt_path = (dir_ / "absent.jsonl").string();
  eargs.pred_path = (dir_ / "absent.jsonl").string();
  EXPECT_EQ(cmd_eval(eargs, out_, err_), 1);
}

TEST_F(CommandsTest, StatsEmitsReportAndHeatmaps) {
  std::vector<LabeledFrame> frames;
  for (int f = 0; f <= 20; ++f) {
    LabeledFrame lf;
    lf.frame = f;
    lf.objects = {{3, Box3D({5.0 + 0.2 * f, 7.0, 0.9}, {0.6, 0.6, 1.8}, 0.0)}};
    frames.push_back(lf);
  }
  {
    std::ofstream os(dir_ / "pred.jsonl");
    write_labeled_jsonl(os, frames);
  }

  StatsArgs args;
  args.pred_path = (dir_ / "pred.jsonl").string();
  args.track_id = 3;
  args.out_dir = (dir_ / "stats").string();
  ASSERT_EQ(cmd_stats(args, out_, err_), 0) << err_.str();

  const nlohmann::json j = nlohmann::json::parse(slurp(dir_ / "stats" / "stats.json"));
  EXPECT_EQ(j["track"], 3);
  EXPECT_NEAR(j["top_speed"].get<double>(), 2.0, 1e-6);
  EXPECT_NEAR(j["distance"].get<double>(), 4.2, 1e-6);  // 21 samples at 2 m/s
  EXPECT_NEAR(j["playing_time"].get<double>(), 2.1, 1e-9);
  EXPECT_EQ(slurp(dir_ / "stats" / "heatmap.pgm").substr(0, 2), "P2");
  EXPECT_FALSE(slurp(dir_ / "stats" / "heatmap.csv").empty());
  EXPECT_EQ(out_.str(), slurp(dir_ / "stats" / "stats.json"));

  args.track_id = 99;
  EXPECT_EQ(cmd_stats(args, out_, err_), 1);
  EXPECT_NE(err_.str().find("not found"), std::string::npos);
}

TEST_F(CommandsTest, PoseReportsZeroPriorForTheUprightPose) {
  spit(dir_ / "pose.json", pose_to_json(upright_pose()).dump());
  PoseArgs args;
  args.pose_path = (dir_ / "pose.json").string();
  ASSERT_EQ(cmd_pose(args, out_, err_), 0) << err_.str();
  const nlohmann::json j = nlohmann::json::parse(out_.str());
  EXPECT_DOUBLE_EQ(j["prior"]["total"].get<double>(), 0.0);
  EXPECT_TRUE(j["accepted"].get<bool>());
  EXPECT_TRUE(j["uncertainty"].is_null());
  EXPECT_DOUBLE_EQ(j["unsup"].get<double>(), 0.0);
}

TEST_F(CommandsTest, PoseUncertaintyGateDropsTheReferenceTerm) {
  spit(dir_ / "pose.json", pose_to_json(upright_pose()).dump());
  Pose3D ref = upright_pose();
  for (auto& j : ref.joints) j.x() += 0.1;
  spit(dir_ / "ref.json", pose_to_json(ref).dump());

  // a point heatmap is certain, so the 3D term stays in
  Heatmap3D certain(8, 8, 8, {0, 0, 0}, 0.1);
  certain.values.assign(certain.values.size(), 0.0);
  certain.values[100] = 1.0;
  write_heatmap((dir_ / "c.json").string(), (dir_ / "c.f32").string(), certain);

  PoseArgs args;
  args.pose_path = (dir_ / "pose.json").string();
  args.ref_path = (dir_ / "ref.json").string();
  args.heatmap_metas = {(dir_ / "c.json").string()};
  ASSERT_EQ(cmd_pose(args, out_, err_), 0) << err_.str();
  nlohmann::json j = nlohmann::json::parse(out_.str());
  EXPECT_TRUE(j["accepted"].get<bool>());
  EXPECT_NEAR(j["l3d"].get<double>(), 1.7, 1e-9);  // 17 joints, 0.1 L1 each
  EXPECT_NEAR(j["unsup"].get<double>(), 1.7, 1e-9);

  // a uniform heatmap's entropy ln(512) exceeds the default gate of 6
  Heatmap3D vague(8, 8, 8, {0, 0, 0}, 0.1);
  vague.values.assign(vague.values.size(), 1.0);
  write_heatmap((dir_ / "u.json").string(), (dir_ / "u.f32").string(), vague);
  args.heatmap_metas = {(dir_ / "u.json").string()};
  std::ostringstream out2;
  ASSERT_EQ(cmd_pose(args, out2, err_), 0) << err_.str();
  j = nlohmann::json::parse(out2.str());
  EXPECT_FALSE(j["accepted"].get<bool>());
  EXPECT_NEAR(j["uncertainty"].get<double>(), std::log(512.0), 1e-6);
  EXPECT_NEAR(j["unsup"].get<double>(), 0.0, 1e-12);  // gated out
}

TEST_F(CommandsTest, PoseRequiresCamerasAndPseudo2dTogether) {
  spit(dir_ / "pose.json", pose_to_json(upright_pose()).dump());
  PoseArgs args;
  args.pose_path = (dir_ / "pose.json").string();
  args.cameras_path = (dir_ / "cams.json").string();
  EXPECT_EQ(cmd_pose(args, out_, err_), 1);
  EXPECT_NE(err_.str().find("together"), std::string::npos);
}

}  // namespace
}  // namespace courttrack
