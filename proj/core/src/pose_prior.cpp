#include "courttrack/pose_prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace courttrack {

namespace {

constexpr double kDegenerate = 1e-9;

double clip01(double x) { return std::clamp(x, 0.0, 1.0); }

// d(unit(x))/dx applied to a downstream gradient
Eigen::Vector3d through_unit(const Eigen::Vector3d& raw,
                             const Eigen::Vector3d& grad) {
  const double n = raw.norm();
  const Eigen::Vector3d hat = raw / n;
  return (grad - hat * hat.dot(grad)) / n;
}

struct ForwardFrame {
  bool ok = false;
  Eigen::Vector3d u_raw, w_raw;  // neck->midhip, neck->left shoulder
  Eigen::Vector3d u_hat, w_hat;
  Eigen::Vector3d f;  // sign * (u_hat x w_hat), not renormalized
};

ForwardFrame forward_frame(const Pose3D& pose, const SkeletonDef& sk) {
  ForwardFrame ff;
  const Eigen::Vector3d neck =
      0.5 * (pose.joints[sk.left_shoulder] + pose.joints[sk.right_shoulder]);
  const Eigen::Vector3d midhip =
      0.5 * (pose.joints[sk.left_hip] + pose.joints[sk.right_hip]);
  ff.u_raw = midhip - neck;
  ff.w_raw = pose.joints[sk.left_shoulder] - neck;
  if (ff.u_raw.norm() < kDegenerate || ff.w_raw.norm() < kDegenerate) return ff;
  ff.u_hat = ff.u_raw.normalized();
  ff.w_hat = ff.w_raw.normalized();
  ff.f = sk.forward_sign * ff.u_hat.cross(ff.w_hat);
  ff.ok = ff.f.norm() >= kDegenerate;
  return ff;
}

}  // namespace

Heatmap3D::Heatmap3D(int nx_in, int ny_in, int nz_in,
                     const Eigen::Vector3d& origin_in, double pitch_in)
    : nx(nx_in), ny(ny_in), nz(nz_in), origin(origin_in), pitch(pitch_in) {
  if (nx <= 0 || ny <= 0 || nz <= 0)
    throw std::invalid_argument("Heatmap3D: dims must be positive");
  if (!(pitch > 0.0)) throw std::invalid_argument("Heatmap3D: pitch must be positive");
  values.assign(static_cast<size_t>(nx) * ny * nz, 0.0);
}

double Heatmap3D::sum() const {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

bool Heatmap3D::is_normalized(double tol) const {
  return std::abs(sum() - 1.0) <= tol;
}

Heatmap3D normalize(const Heatmap3D& h) {
  for (double v : h.values)
    if (v < 0.0) throw std::invalid_argument("normalize: negative mass");
  const double total = h.sum();
  if (!(total > 0.0)) throw std::invalid_argument("normalize: zero total mass");
  Heatmap3D out = h;
  for (double& v : out.values) v /= total;
  return out;
}

Eigen::Vector3d soft_argmax(const Heatmap3D& h) {
  if (!h.is_normalized())
    throw std::invalid_argument("soft_argmax: heatmap not normalized");
  Eigen::Vector3d e = Eigen::Vector3d::Zero();
  size_t idx = 0;
  for (int ix = 0; ix < h.nx; ++ix)
    for (int iy = 0; iy < h.ny; ++iy)
      for (int iz = 0; iz < h.nz; ++iz) {
        const double v = h.values[idx++];
        if (v != 0.0) e += v * h.voxel_center(ix, iy, iz);
      }
  return e;
}

double entropy(const Heatmap3D& h) {
  if (!h.is_normalized())
    throw std::invalid_argument("entropy: heatmap not normalized");
  double e = 0.0;
  for (double v : h.values)
    if (v > 0.0) e -= v * std::log(v);
  return e;
}

double person_uncertainty(const std::vector<Heatmap3D>& joint_heatmaps) {
  if (joint_heatmaps.empty())
    throw std::invalid_argument("person_uncertainty: no joints");
  double u = -std::numeric_limits<double>::infinity();
  for (const Heatmap3D& h : joint_heatmaps) u = std::max(u, entropy(h));
  return u;
}

bool accept_pose(double uncertainty, double lambda) {
  return uncertainty < lambda;
}

const std::vector<std::string>& coco17_joint_names() {
  static const std::vector<std::string> names = {
      "nose",         "left_eye",   "right_eye",     "left_ear",
      "right_ear",    "left_shoulder", "right_shoulder", "left_elbow",
      "right_elbow",  "left_wrist", "right_wrist",   "left_hip",
      "right_hip",    "left_knee",  "right_knee",    "left_ankle",
      "right_ankle"};
  return names;
}

SkeletonDef SkeletonDef::coco17() {
  SkeletonDef sk;
  sk.bones = {{0, 1},  {0, 2},  {1, 3},   {2, 4},   {0, 5},   {0, 6},
              {5, 7},  {6, 8},  {7, 9},   {8, 10},  {5, 11},  {6, 12},
              {11, 13}, {12, 14}, {13, 15}, {14, 16}};
  // clavicles, upper arms, lower arms, torso sides, upper legs, lower legs
  sk.symmetric_pairs = {{4, 5}, {6, 7}, {8, 9}, {10, 11}, {12, 13}, {14, 15}};
  sk.nose = 0;
  sk.left_shoulder = 5;
  sk.right_shoulder = 6;
  sk.left_hip = 11;
  sk.right_hip = 12;
  sk.left_knee = 13;
  sk.right_knee = 14;
  sk.left_ankle = 15;
  sk.right_ankle = 16;
  return sk;
}

void SkeletonDef::validate(int joint_count) const {
  if (static_cast<int>(bones.size()) != joint_count - 1)
    throw std::invalid_argument("SkeletonDef: bone count is not joints - 1");
  std::vector<int> root(joint_count);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int a) {
    while (root[a] != a) a = root[a] = root[root[a]];
    return a;
  };
  for (const Bone& b : bones) {
    if (b.parent < 0 || b.parent >= joint_count || b.child < 0 ||
        b.child >= joint_count || b.parent == b.child)
      throw std::invalid_argument("SkeletonDef: bone endpoint out of range");
    const int ra = find(b.parent);
    const int rb = find(b.child);
    if (ra == rb) throw std::invalid_argument("SkeletonDef: bones form a cycle");
    root[ra] = rb;
  }
  const int n_bones = static_cast<int>(bones.size());
  for (const auto& [a, b] : symmetric_pairs)
    if (a < 0 || a >= n_bones || b < 0 || b >= n_bones || a == b)
      throw std::invalid_argument("SkeletonDef: bad symmetric pair");
  for (int j : {nose, left_shoulder, right_shoulder, left_hip, right_hip,
                left_knee, right_knee, left_ankle, right_ankle})
    if (j < 0 || j >= joint_count)
      throw std::invalid_argument("SkeletonDef: named joint out of range");
}

double pose_l1(const Pose3D& pose, const Pose3D& reference) {
  if (pose.joints.size() != reference.joints.size())
    throw std::invalid_argument("pose_l1: joint counts differ");
  double s = 0.0;
  for (size_t k = 0; k < pose.joints.size(); ++k)
    s += (pose.joints[k] - reference.joints[k]).lpNorm<1>();
  return s;
}

std::vector<std::pair<Eigen::Vector2d, bool>> project_pose(
    const Pose3D& pose, const CameraModel& cam) {
  std::vector<std::pair<Eigen::Vector2d, bool>> out;
  out.reserve(pose.joints.size());
  for (const auto& joint : pose.joints) {
    const Eigen::Vector3d p = cam.to_camera(joint);
    if (p.z() <= kDegenerate) {
      out.emplace_back(Eigen::Vector2d::Zero(), false);
    } else {
      out.emplace_back(Eigen::Vector2d(cam.fx * p.x() / p.z() + cam.cx,
                                       cam.fy * p.y() / p.z() + cam.cy),
                       true);
    }
  }
  return out;
}

double l2d(const Pose3D& pose, const std::vector<CameraModel>& cameras,
           const std::vector<std::vector<std::pair<Eigen::Vector2d, bool>>>&
               pseudo_2d) {
  if (cameras.size() != pseudo_2d.size())
    throw std::invalid_argument("l2d: view counts differ");
  double s = 0.0;
  for (size_t v = 0; v < cameras.size(); ++v) {
    if (pseudo_2d[v].size() != pose.joints.size())
      throw std::invalid_argument("l2d: joint counts differ");
    const auto projected = project_pose(pose, cameras[v]);
    for (size_t k = 0; k < projected.size(); ++k) {
      if (!projected[k].second || !pseudo_2d[v][k].second) continue;
      s += (projected[k].first - pseudo_2d[v][k].first).norm();
    }
  }
  return s;
}

PriorLosses prior_losses(const Pose3D& pose, const SkeletonDef& skeleton,
                         double l_min, double l_max) {
  skeleton.validate(static_cast<int>(pose.joints.size()));
  PriorLosses out;

  std::vector<double> lengths(skeleton.bones.size());
  for (size_t b = 0; b < skeleton.bones.size(); ++b) {
    const auto& bone = skeleton.bones[b];
    lengths[b] = (pose.joints[bone.child] - pose.joints[bone.parent]).norm();
    out.length += std::max(lengths[b] - l_max, 0.0) +
                  std::max(l_min - lengths[b], 0.0);
  }
  for (const auto& [a, b] : skeleton.symmetric_pairs)
    out.symm += std::abs(lengths[a] - lengths[b]);

  const ForwardFrame ff = forward_frame(pose, skeleton);
  if (!ff.ok) {
    out.degenerate_forward = true;
  } else {
    const Eigen::Vector3d neck = 0.5 * (pose.joints[skeleton.left_shoulder] +
                                        pose.joints[skeleton.right_shoulder]);
    const Eigen::Vector3d n_raw = pose.joints[skeleton.nose] - neck;
    if (n_raw.norm() >= kDegenerate)
      out.angle += clip01(ff.f.dot(n_raw.normalized()));
    for (const auto& [hip, knee, ankle] :
         {std::array<int, 3>{skeleton.left_hip, skeleton.left_knee,
                             skeleton.left_ankle},
          std::array<int, 3>{skeleton.right_hip, skeleton.right_knee,
                             skeleton.right_ankle}}) {
      const Eigen::Vector3d d_raw =
          0.5 * (pose.joints[hip] + pose.joints[ankle]) - pose.joints[knee];
      if (d_raw.norm() >= kDegenerate)
        out.angle += clip01(ff.f.dot(d_raw.normalized()));
    }
  }

  out.total = out.length + out.symm + out.angle;
  return out;
}

std::vector<Eigen::Vector3d> prior_grad(const Pose3D& pose,
                                        const SkeletonDef& skeleton,
                                        double l_min, double l_max) {
  skeleton.validate(static_cast<int>(pose.joints.size()));
  std::vector<Eigen::Vector3d> grad(pose.joints.size(),
                                    Eigen::Vector3d::Zero());

  std::vector<double> lengths(skeleton.bones.size());
  std::vector<Eigen::Vector3d> units(skeleton.bones.size());
  for (size_t b = 0; b < skeleton.bones.size(); ++b) {
    const auto& bone = skeleton.bones[b];
    const Eigen::Vector3d d = pose.joints[bone.child] - pose.joints[bone.parent];
    lengths[b] = d.norm();
    if (lengths[b] < kDegenerate)
      throw std::invalid_argument("prior_grad: zero-length bone");
    units[b] = d / lengths[b];

    double active = 0.0;
    if (lengths[b] > l_max) active += 1.0;
    if (lengths[b] < l_min) active -= 1.0;
    if (active != 0.0) {
      grad[bone.child] += active * units[b];
      grad[bone.parent] -= active * units[b];
    }
  }

  for (const auto& [a, b] : skeleton.symmetric_pairs) {
    const double diff = lengths[a] - lengths[b];
    if (diff == 0.0) continue;
    const double s = diff > 0.0 ? 1.0 : -1.0;
    grad[skeleton.bones[a].child] += s * units[a];
    grad[skeleton.bones[a].parent] -= s * units[a];
    grad[skeleton.bones[b].child] -= s * units[b];
    grad[skeleton.bones[b].parent] += s * units[b];
  }

  const ForwardFrame ff = forward_frame(pose, skeleton);
  if (!ff.ok) return grad;

  const int ls = skeleton.left_shoulder;
  const int rs = skeleton.right_shoulder;
  const int lh = skeleton.left_hip;
  const int rh = skeleton.right_hip;
  const double sign = skeleton.forward_sign;
  const Eigen::Vector3d neck = 0.5 * (pose.joints[ls] + pose.joints[rs]);

  // one clipped dot f . unit(raw); spreads the chain rule over the raw
  // shoulder/hip midpoint vectors and the term's own raw vector
  auto add_angle_term = [&](const Eigen::Vector3d& raw,
                            auto&& distribute_raw) {
    if (raw.norm() < kDegenerate) return;
    const Eigen::Vector3d hat = raw.normalized();
    const double value = ff.f.dot(hat);
    if (value <= 0.0 || value >= 1.0) return;  // outside the active clip band

    const Eigen::Vector3d g_u =
        through_unit(ff.u_raw, sign * ff.w_hat.cross(hat));
    const Eigen::Vector3d g_w =
        through_unit(ff.w_raw, sign * hat.cross(ff.u_hat));
    const Eigen::Vector3d g_raw = through_unit(raw, ff.f);

    grad[lh] += 0.5 * g_u;
    grad[rh] += 0.5 * g_u;
    grad[ls] += -0.5 * g_u + 0.5 * g_w;
    grad[rs] += -0.5 * g_u - 0.5 * g_w;
    distribute_raw(g_raw);
  };

  add_angle_term(pose.joints[skeleton.nose] - neck,
                 [&](const Eigen::Vector3d& g) {
                   grad[skeleton.nose] += g;
                   grad[ls] -= 0.5 * g;
                   grad[rs] -= 0.5 * g;
                 });
  for (const auto& [hip, knee, ankle] :
       {std::array<int, 3>{lh, skeleton.left_knee, skeleton.left_ankle},
        std::array<int, 3>{rh, skeleton.right_knee, skeleton.right_ankle}}) {
    add_angle_term(
        0.5 * (pose.joints[hip] + pose.joints[ankle]) - pose.joints[knee],
        [&, hip = hip, knee = knee, ankle = ankle](const Eigen::Vector3d& g) {
          grad[hip] += 0.5 * g;
          grad[ankle] += 0.5 * g;
          grad[knee] -= g;
        });
  }
  return grad;
}

double unsup_loss(double loss_2d, double loss_3d, double loss_prior,
                  bool accepted, const UnsupWeights& weights) {
  return weights.w_2d * loss_2d + (accepted ? weights.w_3d * loss_3d : 0.0) +
         weights.w_prior * loss_prior;
}

}  // namespace courttrack
