#include "courttrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

namespace courttrack {
namespace {

Detection det_at(double x, double y, const Eigen::Vector3d& feat_dir,
                 double conf = 1.0) {
  Detection d;
  d.box = Box3D({x, y, 0.9}, {0.6, 0.6, 1.8}, 0.0);
  d.confidence = conf;
  DetectionFeature df;
  df.feature.vec = feat_dir.normalized();
  df.valid = true;
  d.features.push_back(df);
  return d;
}

const Eigen::Vector3d kFeatA(1.0, 0.0, 0.0);
const Eigen::Vector3d kFeatB(0.0, 1.0, 0.0);

TEST(TrackerConfig, Validation) {
  TrackerConfig c;
  EXPECT_NO_THROW(c.validate());
  c.alpha = 1.2;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = TrackerConfig{};
  c.hit_confirm = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = TrackerConfig{};
  c.frame_rate = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Tracker, StationaryObjectYieldsOneActiveTrack) {
  Tracker tracker;
  const auto out0 = tracker.step({0, {det_at(14, 7.5, kFeatA)}});
  EXPECT_TRUE(out0.empty());  // tentative until the second hit
  const auto out1 = tracker.step({1, {det_at(14, 7.5, kFeatA)}});
  ASSERT_EQ(out1.size(), 1u);
  EXPECT_EQ(out1[0].id, 1);
  EXPECT_EQ(out1[0].status, TrackStatus::Active);
  const auto out2 = tracker.step({2, {det_at(14, 7.5, kFeatA)}});
  ASSERT_EQ(out2.size(), 1u);
  EXPECT_EQ(out2[0].id, 1);
  EXPECT_NEAR(out2[0].box.center.x(), 14.0, 1e-9);
}

TEST(Tracker, FramesMustStrictlyAdvance) {
  Tracker tracker;
  tracker.step({5, {}});
  EXPECT_THROW(tracker.step({5, {}}), std::invalid_argument);
  EXPECT_THROW(tracker.step({4, {}}), std::invalid_argument);
  EXPECT_NO_THROW(tracker.step({7, {}}));
}

TEST(Tracker, ConfidenceGateDropsWeakDetections) {
  TrackerConfig config;
  config.confidence_gate = 0.5;
  Tracker tracker(config);
  for (long f = 0; f < 4; ++f)
    tracker.step({f, {det_at(10, 7, kFeatA, 0.3)}});
  EXPECT_TRUE(tracker.tracks().empty());
}

TEST(Tracker, TracksNoiselessConstantVelocityTarget) {
  Tracker tracker;
  double err_after_5 = 0.0;
  double final_err = 0.0;
  for (long f = 0; f <= 50; ++f) {
    const double x = 2.0 + 0.2 * static_cast<double>(f);  // 2 m/s at 10 Hz
    const auto out = tracker.step({f, {det_at(x, 7.0, kFeatA)}});
    if (f >= 1) {
      ASSERT_EQ(out.size(), 1u);
      const double err = std::abs(out[0].box.center.x() - x);
      if (f >= 5) err_after_5 = std::max(err_after_5, err);
      final_err = err;
    }
  }
  EXPECT_LT(err_after_5, 0.1);
  EXPECT_LT(final_err, 1e-3);
}

TEST(Tracker, UnmatchedTentativeDies) {
  Tracker tracker;
  tracker.step({0, {det_at(10, 7, kFeatA)}});
  EXPECT_EQ(tracker.tracks().size(), 1u);
  tracker.step({1, {}});
  EXPECT_TRUE(tracker.tracks().empty());
}

TEST(Tracker, InsideBreakRegainsWithSameIdAndGapFill) {
  std::vector<FrameInput> seq;
  for (long f = 0; f <= 4; ++f) seq.push_back({f, {det_at(10, 7, kFeatA)}});
  for (long f = 5; f <= 7; ++f) seq.push_back({f, {}});
  for (long f = 8; f <= 10; ++f) seq.push_back({f, {det_at(12, 7, kFeatA)}});

  const TrajectorySet traj = run_tracker(TrackerConfig{}, seq);
  ASSERT_EQ(traj.tracks.size(), 1u);
  EXPECT_EQ(traj.tracks[0].id, 1);
  EXPECT_EQ(traj.tracks[0].regains, 1);
  EXPECT_EQ(traj.tracks[0].first_frame, 1);
  EXPECT_EQ(traj.tracks[0].last_frame, 10);

  // gap frames carry interpolated fills: x moves 10 -> 12 over frames 4..8
  for (long f = 5; f <= 7; ++f) {
    const auto& frame = traj.frames[static_cast<size_t>(f)];
    ASSERT_EQ(frame.first, f);
    ASSERT_EQ(frame.second.size(), 1u);
    EXPECT_TRUE(frame.second[0].interpolated);
    EXPECT_EQ(frame.second[0].id, 1);
    EXPECT_NEAR(frame.second[0].box.center.x(),
                10.0 + 0.5 * static_cast<double>(f - 4), 1e-6);
  }
  // the regain frame itself is a real detection match
  EXPECT_FALSE(traj.frames[8].second[0].interpolated);
}

TEST(Tracker, EdgeExitRegainsOnlyThroughSameBand) {
  Tracker tracker;
  for (long f = 0; f <= 5; ++f) {
    const double x = 26.0 + 0.3 * static_cast<double>(f);  // ends at 27.5
    tracker.step({f, {det_at(x, 7.5, kFeatA)}});
  }
  for (long f = 6; f <= 8; ++f) tracker.step({f, {}});

  // reappearance in the same east band plus a decoy at midfield
  const auto out = tracker.step(
      {9, {det_at(27.3, 8.5, kFeatA), det_at(14, 7.5, kFeatB)}});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].id, 1);
  EXPECT_NEAR(out[0].box.center.x(), 27.3, 1e-9);
  // midfield decoy seeded a fresh tentative instead of stealing the id
  ASSERT_EQ(tracker.tracks().size(), 2u);
  EXPECT_EQ(tracker.tracks()[1].status, TrackStatus::Tentative);
  // edge exits never synthesize out-of-view positions
  EXPECT_TRUE(tracker.take_gap_fills().empty());
}

TEST(Tracker, CenterDetectionCannotRegainEdgeExit) {
  Tracker tracker;
  for (long f = 0; f <= 5; ++f) {
    const double x = 26.0 + 0.3 * static_cast<double>(f);
    tracker.step({f, {det_at(x, 7.5, kFeatA)}});
  }
  for (long f = 6; f <= 8; ++f) tracker.step({f, {}});
  // same appearance, wrong re-entry location
  tracker.step({9, {det_at(14, 7.5, kFeatA)}});
  tracker.step({10, {det_at(14, 7.5, kFeatA)}});
  const auto out = tracker.step({11, {det_at(14, 7.5, kFeatA)}});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].id, 2);
}

TEST(Tracker, BrokenTrackRetiresAfterMaxAge) {
  TrackerConfig config;
  config.max_broken_age = 3;
  Tracker tracker(config);
  for (long f = 0; f <= 4; ++f) tracker.step({f, {det_at(10, 7, kFeatA)}});
  for (long f = 5; f <= 9; ++f) tracker.step({f, {}});
  // 10 - 5 > 3: the break expired; the comeback seeds a new identity
  tracker.step({10, {det_at(10.5, 7, kFeatA)}});
  const auto out = tracker.step({11, {det_at(10.5, 7, kFeatA)}});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].id, 2);
  const auto& tracks = tracker.tracks();
  ASSERT_EQ(tracks.size(), 2u);
  EXPECT_EQ(tracks[0].status, TrackStatus::Exited);
}

TEST(Tracker, RegainDisabledSplitsIdentity) {
  TrackerConfig config;
  config.enable_regain = false;
  std::vector<FrameInput> seq;
  for (long f = 0; f <= 4; ++f) seq.push_back({f, {det_at(10, 7, kFeatA)}});
  for (long f = 5; f <= 7; ++f) seq.push_back({f, {}});
  for (long f = 8; f <= 11; ++f) seq.push_back({f, {det_at(11, 7, kFeatA)}});
  const TrajectorySet traj = run_tracker(config, seq);
  std::set<int> ids;
  for (const auto& [frame, outs] : traj.frames)
    for (const auto& o : outs) ids.insert(o.id);
  EXPECT_EQ(ids.size(), 2u);
}

TEST(Tracker, TwoCrossingTargetsKeepIdsByAppearance) {
  // two agents swap x positions while their features stay fixed; with
  // alpha 0.5 the appearance term must keep the identities apart
  std::vector<FrameInput> seq;
  for (long f = 0; f <= 20; ++f) {
    const double t = static_cast<double>(f) / 20.0;
    FrameInput in{f, {}};
    in.detections.push_back(det_at(10.0 + 8.0 * t, 7.0, kFeatA));
    in.detections.push_back(det_at(18.0 - 8.0 * t, 7.3, kFeatB));
    seq.push_back(in);
  }
  const TrajectorySet traj = run_tracker(TrackerConfig{}, seq);
  ASSERT_EQ(traj.tracks.size(), 2u);
  // id 1 ends where agent A ends (x = 18)
  const auto& last = traj.frames.back().second;
  ASSERT_EQ(last.size(), 2u);
  const auto& id1 = last[0].id == 1 ? last[0] : last[1];
  EXPECT_NEAR(id1.box.center.x(), 18.0, 0.3);
}

TEST(RunTracker, FramesSortedByIdAndSummariesCount) {
  std::vector<FrameInput> seq;
  for (long f = 0; f < 6; ++f) {
    FrameInput in{f, {}};
    in.detections.push_back(det_at(20, 10, kFeatB));
    in.detections.push_back(det_at(10, 7, kFeatA));
    seq.push_back(in);
  }
  const TrajectorySet traj = run_tracker(TrackerConfig{}, seq);
  ASSERT_EQ(traj.tracks.size(), 2u);
  for (const auto& [frame, outs] : traj.frames)
    for (size_t i = 1; i < outs.size(); ++i)
      EXPECT_LT(outs[i - 1].id, outs[i].id);
  for (const auto& s : traj.tracks) {
    EXPECT_EQ(s.first_frame, 1);
    EXPECT_EQ(s.last_frame, 5);
    EXPECT_EQ(s.frames, 5);
    EXPECT_EQ(s.regains, 0);
  }
}

}  // namespace
}  // namespace courttrack
