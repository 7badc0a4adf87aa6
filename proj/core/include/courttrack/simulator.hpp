#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "courttrack/geometry.hpp"
#include "courttrack/metrics.hpp"
#include "courttrack/regain.hpp"
#include "courttrack/tracker.hpp"

namespace courttrack {

// Rosette scan pattern r = alpha * cos(3.825 * (theta0 + 0.0017 * n)),
// sampled at 1e5 points per second: n = 0 .. floor(t * 1e5), each point
// converted from polar (r, theta0 + 0.0017 * n) and translated to center.
std::vector<Eigen::Vector2d> lidar_scan_samples(
    double t, double alpha, double theta0,
    const Eigen::Vector2d& center = Eigen::Vector2d::Zero());

struct AgentScript {
  std::vector<Eigen::Vector2d> waypoints;  // ground path, walked in order
  std::vector<double> speeds;              // m/s per leg; one entry broadcasts
  Eigen::Vector3d dims{0.6, 0.6, 1.8};
  int team = -1;  // agents sharing a team id get correlated embeddings
};

struct LidarModel {
  Eigen::Vector2d center{14.0, 7.5};  // ground position, m
  double alpha = 1000.0;              // pattern radius in sensor pixels
  double scale = 0.02;                // pixels -> metres on the ground
  double theta0 = 0.0;
};

struct NoiseModel {
  double pos_sigma = 0.05;
  double feat_sigma = 0.1;
  double merge_dist = 0.5;  // ground distance that fuses nearby detections
  int min_points = 20;      // scan hits below this drop the detection
  double dropout = 0.01;
  double occlusion_iou = 0.3;
};

struct ScenarioConfig {
  uint64_t seed = 1;
  FieldModel field;
  std::vector<AgentScript> agents;
  std::vector<CameraModel> cameras;
  std::vector<LidarModel> lidars;  // empty disables the min-points filter
  double frame_rate = 10.0;        // Hz
  double duration = 10.0;          // s
  NoiseModel noise;
  int embedding_dim = 512;
  double team_mix = 0.0;  // 0 = independent identities, 1 = pure team vector

  long frame_count() const;
  // throws std::invalid_argument; rejects non-positive duration/frame rate
  // and zero speed on a leg of positive length
  void validate() const;
};

struct GroundTruth {
  std::vector<LabeledFrame> frames;         // object id = agent index
  std::vector<Eigen::VectorXd> embeddings;  // unit norm, one per agent
};

// Agents walk their waypoints at the scripted speeds, hold at the last one,
// and are emitted only while inside the field. Deterministic from seed.
GroundTruth generate(const ScenarioConfig& config);

// Detector stand-in. Per frame, in order: Gaussian position noise; merging
// of detections closer than merge_dist (union box, identity lost); LiDAR
// hit-count visibility; per-view appearance features with occlusion
// validity; independent dropout. Uses an RNG stream independent of
// generate(), so the pair is deterministic from config.seed alone.
std::vector<FrameInput> render_detections(const GroundTruth& gt,
                                          const ScenarioConfig& config);

// Camera at eye looking at target, world +z up, y_cam pointing down.
CameraModel make_lookat_camera(const Eigen::Vector3d& eye,
                               const Eigen::Vector3d& target, double fx,
                               double fy, double width, double height);

}  // namespace courttrack
