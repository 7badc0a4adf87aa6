#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

#include "courttrack/geometry.hpp"

namespace courttrack {

/** Dense non-negative voxel grid over a cube of space around a person. */
struct Heatmap3D {
  int nx = 0, ny = 0, nz = 0;
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();  // min corner
  double pitch = 0.0;                                // voxel edge, meters
  std::vector<double> values;                        // x-major: ((ix*ny)+iy)*nz+iz

  Heatmap3D() = default;
  // throws std::invalid_argument on non-positive dims or pitch
  Heatmap3D(int nx_in, int ny_in, int nz_in, const Eigen::Vector3d& origin_in,
            double pitch_in);

  double& at(int ix, int iy, int iz) {
    return values[(static_cast<size_t>(ix) * ny + iy) * nz + iz];
  }
  double at(int ix, int iy, int iz) const {
    return values[(static_cast<size_t>(ix) * ny + iy) * nz + iz];
  }
  Eigen::Vector3d voxel_center(int ix, int iy, int iz) const {
    return origin + pitch * Eigen::Vector3d(ix + 0.5, iy + 0.5, iz + 0.5);
  }
  size_t size() const { return values.size(); }
  double sum() const;
  bool is_normalized(double tol = 1e-9) const;
};

// scales the grid to unit mass; throws std::invalid_argument when the mass is
// zero or any value is negative
Heatmap3D normalize(const Heatmap3D& h);

// expectation of voxel centers under the heatmap; requires a normalized input
Eigen::Vector3d soft_argmax(const Heatmap3D& h);

// Shannon entropy in nats, 0 log 0 = 0; requires a normalized input
double entropy(const Heatmap3D& h);

// highest joint entropy; throws std::invalid_argument on an empty set
double person_uncertainty(const std::vector<Heatmap3D>& joint_heatmaps);

// strict acceptance test: uncertainty < lambda
bool accept_pose(double uncertainty, double lambda);

struct Pose3D {
  std::vector<Eigen::Vector3d> joints;
};

// joint order used by the default skeleton
const std::vector<std::string>& coco17_joint_names();

/**
 * Bone graph over named joints. The default 17-joint skeleton forms a tree of
 * 16 bones with six left/right pairs; the neck and mid-hip used by the angle
 * terms are synthesized as shoulder and hip midpoints.
 */
struct SkeletonDef {
  struct Bone {
    int parent = 0;
    int child = 0;
  };
  std::vector<Bone> bones;
  std::vector<std::pair<int, int>> symmetric_pairs;  // bone index pairs
  int nose = 0;
  int left_shoulder = 0, right_shoulder = 0;
  int left_hip = 0, right_hip = 0;
  int left_knee = 0, right_knee = 0;
  int left_ankle = 0, right_ankle = 0;
  // flips the handedness of the forward direction built from the spine and
  // shoulder vectors
  double forward_sign = 1.0;

  static SkeletonDef coco17();
  // throws std::invalid_argument unless the bones span a tree over n joints
  void validate(int joint_count) const;
};

// sum over joints of the L1 distance to the reference;
// throws std::invalid_argument on joint-count mismatch
double pose_l1(const Pose3D& pose, const Pose3D& reference);
inline double l3d(const Pose3D& pose, const Pose3D& pseudo_label) {
  return pose_l1(pose, pseudo_label);
}

// pinhole projection per joint; joints behind the camera come back invalid
std::vector<std::pair<Eigen::Vector2d, bool>> project_pose(
    const Pose3D& pose, const CameraModel& cam);

// sum over views and joints of the L2 reprojection distance against 2D pseudo
// labels, skipping invalid projections and invalid labels
double l2d(const Pose3D& pose, const std::vector<CameraModel>& cameras,
           const std::vector<std::vector<std::pair<Eigen::Vector2d, bool>>>&
               pseudo_2d);

struct PriorLosses {
  double length = 0.0;  // bone lengths clipped to [l_min, l_max]
  double symm = 0.0;    // absolute length differences over symmetric pairs
  double angle = 0.0;   // head and knee orientation against the forward axis
  double total = 0.0;
  bool degenerate_forward = false;  // collinear spine/shoulder, angle forced 0
};

PriorLosses prior_losses(const Pose3D& pose, const SkeletonDef& skeleton,
                         double l_min = 0.05, double l_max = 0.7);

// analytic gradient of the total prior w.r.t. every joint;
// throws std::invalid_argument on a zero-length bone
std::vector<Eigen::Vector3d> prior_grad(const Pose3D& pose,
                                        const SkeletonDef& skeleton,
                                        double l_min = 0.05,
                                        double l_max = 0.7);

struct UnsupWeights {
  double w_2d = 0.02;
  double w_3d = 1.0;
  double w_prior = 10.0;
};

// weighted unsupervised objective; the 3D term engages only for accepted
// (low-uncertainty) pseudo labels
double unsup_loss(double loss_2d, double loss_3d, double loss_prior,
                  bool accepted, const UnsupWeights& weights = {});

}  // namespace courttrack
