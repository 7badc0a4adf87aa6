#include "courttrack/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "courttrack/rng.hpp"

namespace courttrack {

namespace {

Eigen::Vector2d scan_point(double alpha, double theta0, long n) {
  const double theta = theta0 + 0.0017 * static_cast<double>(n);
  const double r = alpha * std::cos(3.825 * theta);
  return {r * std::cos(theta), r * std::sin(theta)};
}

Eigen::VectorXd random_unit(Rng& rng, int dim) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.normal();
  return v.normalized();
}

// piecewise-linear waypoint schedule with precomputed leg times
struct AgentPath {
  struct Leg {
    Eigen::Vector2d a, b;
    double t0, t1, heading;
  };
  std::vector<Leg> legs;
  Eigen::Vector2d rest;        // position held after the last leg
  double rest_heading = 0.0;

  std::pair<Eigen::Vector2d, double> at(double t) const {
    for (const Leg& leg : legs) {
      if (t < leg.t1) {
        const double u = std::max(t - leg.t0, 0.0) / (leg.t1 - leg.t0);
        return {leg.a + u * (leg.b - leg.a), leg.heading};
      }
    }
    return {rest, rest_heading};
  }
};

AgentPath build_path(const AgentScript& agent) {
  AgentPath path;
  path.rest = agent.waypoints.front();
  double t = 0.0;
  for (size_t i = 0; i + 1 < agent.waypoints.size(); ++i) {
    const Eigen::Vector2d a = agent.waypoints[i];
    const Eigen::Vector2d b = agent.waypoints[i + 1];
    const double len = (b - a).norm();
    if (len == 0.0) continue;
    const double speed = agent.speeds.size() == 1 ? agent.speeds[0]
                                                  : agent.speeds[i];
    const double heading = std::atan2(b.y() - a.y(), b.x() - a.x());
    path.legs.push_back({a, b, t, t + len / speed, heading});
    t += len / speed;
    path.rest = b;
    path.rest_heading = heading;
  }
  return path;
}

}  // namespace

std::vector<Eigen::Vector2d> lidar_scan_samples(double t, double alpha,
                                                double theta0,
                                                const Eigen::Vector2d& center) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw std::invalid_argument("lidar_scan_samples: bad time");
  const long n_max = static_cast<long>(std::floor(t * 1e5));
  std::vector<Eigen::Vector2d> out;
  out.reserve(static_cast<size_t>(n_max) + 1);
  for (long n = 0; n <= n_max; ++n)
    out.push_back(center + scan_point(alpha, theta0, n));
  return out;
}

long ScenarioConfig::frame_count() const {
  return std::max<long>(1, std::llround(duration * frame_rate));
}

void ScenarioConfig::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw std::invalid_argument("scenario: duration must be positive");
  if (!(frame_rate > 0.0) || !std::isfinite(frame_rate))
    throw std::invalid_argument("scenario: frame rate must be positive");
  field.validate();
  for (const AgentScript& a : agents) {
    if (a.waypoints.empty())
      throw std::invalid_argument("scenario: agent without waypoints");
    if (!(a.dims.minCoeff() > 0.0))
      throw std::invalid_argument("scenario: agent dims must be positive");
    const size_t n_legs = a.waypoints.size() - 1;
    if (n_legs > 0 && a.speeds.size() != 1 && a.speeds.size() != n_legs)
      throw std::invalid_argument("scenario: speeds must be 1 or one per leg");
    for (size_t i = 0; i < n_legs; ++i) {
      const double len = (a.waypoints[i + 1] - a.waypoints[i]).norm();
      const double speed = a.speeds.size() == 1 ? a.speeds[0] : a.speeds[i];
      if (len > 0.0 && (!(speed > 0.0) || !std::isfinite(speed)))
        throw std::invalid_argument("scenario: leg speed must be positive");
    }
  }
  for (const CameraModel& cam : cameras) cam.validate();
  for (const LidarModel& l : lidars)
    if (!(l.alpha > 0.0) || !(l.scale > 0.0))
      throw std::invalid_argument("scenario: lidar alpha/scale must be positive");
  if (!(noise.pos_sigma >= 0.0) || !(noise.feat_sigma >= 0.0) ||
      !(noise.merge_dist >= 0.0) || noise.min_points < 0 ||
      !(noise.dropout >= 0.0 && noise.dropout < 1.0) ||
      !(noise.occlusion_iou >= 0.0 && noise.occlusion_iou <= 1.0))
    throw std::invalid_argument("scenario: bad noise model");
  if (embedding_dim < 1)
    throw std::invalid_argument("scenario: embedding_dim must be >= 1");
  if (!(team_mix >= 0.0 && team_mix <= 1.0))
    throw std::invalid_argument("scenario: team_mix must be in [0, 1]");
}

GroundTruth generate(const ScenarioConfig& config) {
  config.validate();
  Rng rng(config.seed);
  GroundTruth gt;

  // draw order: team vectors in ascending team id, then one per agent
  std::map<int, Eigen::VectorXd> team_vecs;
  for (const AgentScript& a : config.agents)
    if (a.team >= 0) team_vecs.emplace(a.team, Eigen::VectorXd());
  for (auto& [team, vec] : team_vecs) vec = random_unit(rng, config.embedding_dim);
  for (const AgentScript& a : config.agents) {
    Eigen::VectorXd own = random_unit(rng, config.embedding_dim);
    if (a.team >= 0 && config.team_mix > 0.0)
      own = (std::sqrt(config.team_mix) * team_vecs.at(a.team) +
             std::sqrt(1.0 - config.team_mix) * own)
                .normalized();
    gt.embeddings.push_back(std::move(own));
  }

  std::vector<AgentPath> paths;
  paths.reserve(config.agents.size());
  for (const AgentScript& a : config.agents) paths.push_back(build_path(a));

  const long n_frames = config.frame_count();
  gt.frames.reserve(n_frames);
  for (long f = 0; f < n_frames; ++f) {
    LabeledFrame frame{f, {}};
    for (size_t i = 0; i < config.agents.size(); ++i) {
      const auto [pos, heading] = paths[i].at(f / config.frame_rate);
      if (!config.field.contains(pos.x(), pos.y())) continue;
      const Eigen::Vector3d& dims = config.agents[i].dims;
      frame.objects.push_back(
          {static_cast<int>(i),
           Box3D({pos.x(), pos.y(), dims.z() / 2.0}, dims, wrap_angle(heading))});
    }
    gt.frames.push_back(std::move(frame));
  }
  return gt;
}

std::vector<FrameInput> render_detections(const GroundTruth& gt,
                                          const ScenarioConfig& config) {
  config.validate();
  for (const LabeledFrame& f : gt.frames)
    for (const LabeledBox& ob : f.objects)
      if (ob.id < 0 || ob.id >= static_cast<int>(gt.embeddings.size()))
        throw std::invalid_argument("render_detections: object id has no embedding");

  Rng rng(~config.seed);  // independent of the generate() stream
  const long samples_per_frame =
      std::max<long>(1, std::llround(1e5 / config.frame_rate));

  struct Working {
    Eigen::Vector3d center;
    Eigen::Vector3d dims;
    double yaw;
    std::vector<int> members;
  };

  std::vector<FrameInput> out;
  out.reserve(gt.frames.size());
  for (const LabeledFrame& gf : gt.frames) {
    std::vector<Working> work;
    work.reserve(gf.objects.size());
    for (const LabeledBox& ob : gf.objects) {
      const Eigen::Vector3d noise(rng.normal(0.0, config.noise.pos_sigma),
                                  rng.normal(0.0, config.noise.pos_sigma),
                                  rng.normal(0.0, config.noise.pos_sigma));
      work.push_back({ob.box.center + noise, ob.box.dims, ob.box.yaw, {ob.id}});
    }

    // merge any group whose members chain within merge_dist on the ground
    std::vector<int> root(work.size());
    std::iota(root.begin(), root.end(), 0);
    auto find = [&](int a) {
      while (root[a] != a) a = root[a] = root[root[a]];
      return a;
    };
    for (size_t i = 0; i < work.size(); ++i)
      for (size_t j = i + 1; j < work.size(); ++j)
        if ((work[i].center - work[j].center).head<2>().norm() <
            config.noise.merge_dist)
          root[find(static_cast<int>(i))] = find(static_cast<int>(j));

    std::vector<Working> merged;
    std::map<int, std::vector<int>> groups;  // root -> member indices, ordered
    for (size_t i = 0; i < work.size(); ++i)
      groups[find(static_cast<int>(i))].push_back(static_cast<int>(i));
    std::vector<const std::vector<int>*> ordered(work.size(), nullptr);
    for (const auto& [r, members] : groups) ordered[members.front()] = &members;
    for (size_t i = 0; i < work.size(); ++i) {
      if (ordered[i] == nullptr) continue;
      const std::vector<int>& members = *ordered[i];
      if (members.size() == 1) {
        merged.push_back(work[i]);
        continue;
      }
      Eigen::Vector3d lo = Eigen::Vector3d::Constant(
          std::numeric_limits<double>::infinity());
      Eigen::Vector3d hi = -lo;
      Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
      Working m;
      for (int idx : members) {
        centroid += work[idx].center;
        lo = lo.cwiseMin(work[idx].center - work[idx].dims / 2.0);
        hi = hi.cwiseMax(work[idx].center + work[idx].dims / 2.0);
        m.members.push_back(work[idx].members.front());
      }
      std::sort(m.members.begin(), m.members.end());
      m.center = centroid / static_cast<double>(members.size());
      m.center.z() = 0.5 * (lo.z() + hi.z());
      m.dims = hi - lo;
      m.yaw = 0.0;
      merged.push_back(std::move(m));
    }

    // hit-count visibility: total scan samples landing in the footprint
    std::vector<Working> visible;
    if (config.lidars.empty()) {
      visible = std::move(merged);
    } else {
      const long n0 = gf.frame * samples_per_frame;
      std::vector<Eigen::Vector2d> points;
      points.reserve(config.lidars.size() * samples_per_frame);
      for (const LidarModel& l : config.lidars)
        for (long n = n0; n < n0 + samples_per_frame; ++n)
          points.push_back(l.center + l.scale * scan_point(l.alpha, l.theta0, n));
      for (Working& w : merged) {
        int hits = 0;
        for (const Eigen::Vector2d& p : points)
          if (std::abs(p.x() - w.center.x()) <= w.dims.x() / 2.0 &&
              std::abs(p.y() - w.center.y()) <= w.dims.y() / 2.0)
            ++hits;
        if (hits >= config.noise.min_points) visible.push_back(std::move(w));
      }
    }

    // per-view occlusion flags over the surviving boxes
    std::vector<Box3D> boxes;
    boxes.reserve(visible.size());
    for (const Working& w : visible) boxes.emplace_back(w.center, w.dims, w.yaw);
    std::vector<std::vector<bool>> view_ok(config.cameras.size(),
                                           std::vector<bool>(visible.size(), false));
    for (size_t v = 0; v < config.cameras.size(); ++v) {
      std::vector<Box2D> projected;
      std::vector<size_t> owner;
      for (size_t i = 0; i < boxes.size(); ++i) {
        if (auto b = project_box(boxes[i], config.cameras[v])) {
          projected.push_back(*b);
          owner.push_back(i);
        }
      }
      const std::vector<bool> keep =
          occlusion_filter(projected, config.noise.occlusion_iou);
      for (size_t k = 0; k < owner.size(); ++k) view_ok[v][owner[k]] = keep[k];
    }

    // features: always one draw per (detection, view) in order
    std::vector<Detection> detections;
    detections.reserve(visible.size());
    for (size_t i = 0; i < visible.size(); ++i) {
      Detection det;
      det.box = boxes[i];
      det.confidence = 1.0;
      const bool single = visible[i].members.size() == 1;
      Eigen::VectorXd base;
      if (single) {
        base = gt.embeddings[visible[i].members.front()];
      } else {
        base = Eigen::VectorXd::Zero(config.embedding_dim);
        for (int id : visible[i].members) base += gt.embeddings[id];
        base.normalize();
      }
      for (size_t v = 0; v < config.cameras.size(); ++v) {
        Eigen::VectorXd noisy = base;
        for (int d = 0; d < config.embedding_dim; ++d)
          noisy[d] += rng.normal(0.0, config.noise.feat_sigma);
        DetectionFeature df;
        df.feature.vec = noisy.normalized();
        df.feature.view = static_cast<int>(v);
        df.feature.frame = gf.frame;
        df.valid = single && view_ok[v][i];
        det.features.push_back(std::move(df));
      }
      detections.push_back(std::move(det));
    }

    // independent dropout, one draw per detection
    FrameInput fin;
    fin.frame = gf.frame;
    for (Detection& det : detections)
      if (rng.uniform01() >= config.noise.dropout)
        fin.detections.push_back(std::move(det));
    out.push_back(std::move(fin));
  }
  return out;
}

CameraModel make_lookat_camera(const Eigen::Vector3d& eye,
                               const Eigen::Vector3d& target, double fx,
                               double fy, double width, double height) {
  const Eigen::Vector3d forward = (target - eye).normalized();
  const Eigen::Vector3d down(0.0, 0.0, -1.0);
  Eigen::Vector3d right = down.cross(forward);
  if (right.norm() < 1e-9)
    throw std::invalid_argument("make_lookat_camera: view axis is vertical");
  right.normalize();
  const Eigen::Vector3d y_cam = forward.cross(right);
  CameraModel cam;
  cam.fx = fx;
  cam.fy = fy;
  cam.cx = width / 2.0;
  cam.cy = height / 2.0;
  cam.width = width;
  cam.height = height;
  cam.rotation.row(0) = right;
  cam.rotation.row(1) = y_cam;
  cam.rotation.row(2) = forward;
  cam.translation = -cam.rotation * eye;
  cam.validate();
  return cam;
}

}  // namespace courttrack
