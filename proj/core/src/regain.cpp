#include "courttrack/regain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace courttrack {

void FieldModel::validate() const {
  if (!(x_max > x_min) || !(y_max > y_min))
    throw std::invalid_argument("FieldModel: empty extent");
  if (!(margin > 0.0))
    throw std::invalid_argument("FieldModel: margin must be positive");
}

namespace {

double edge_distance(const Eigen::Vector3d& p, const FieldModel& f, Edge e) {
  switch (e) {
    case Edge::North: return std::abs(f.y_max - p.y());
    case Edge::South: return std::abs(p.y() - f.y_min);
    case Edge::East: return std::abs(f.x_max - p.x());
    case Edge::West: return std::abs(p.x() - f.x_min);
  }
  return 0.0;
}

}  // namespace

std::optional<Edge> classify_exit(const Eigen::Vector3d& position,
                                  const FieldModel& field) {
  field.validate();
  // tie order N, S, E, W is fixed by the enumeration order here
  constexpr Edge order[4] = {Edge::North, Edge::South, Edge::East, Edge::West};
  std::optional<Edge> best;
  double best_d = 0.0;
  for (Edge e : order) {
    const double d = edge_distance(position, field, e);
    if (d > field.margin) continue;
    if (!best || d < best_d) {
      best = e;
      best_d = d;
    }
  }
  return best;
}

double local_area_radius(long broken_at, long now, double dt, double v_max,
                         double r0) {
  if (now < broken_at)
    throw std::invalid_argument("local_area_radius: now precedes the break");
  return r0 + v_max * static_cast<double>(now - broken_at) * dt;
}

bool geometry_constraint(const Box3D& detection, const BrokenTrack& broken,
                         const FieldModel& field, long now, double dt,
                         double v_max, double r0) {
  if (broken.exit) {
    const auto band = classify_exit(detection.center, field);
    return band && *band == *broken.exit;
  }
  const double r = local_area_radius(broken.broken_at, now, dt, v_max, r0);
  return (detection.center - broken.last_position).norm() <= r;
}

double regain_score(const Box3D& detection,
                    const std::vector<Feature>& det_features,
                    const BrokenTrack& broken, double alpha, int top_k,
                    bool constraint_ok) {
  if (!constraint_ok) return -1.0;
  const double g = diou3d(detection, broken.predicted);
  double a = g;  // no appearance memory leaves only geometry
  if (broken.bank != nullptr)
    a = appearance_score(det_features, *broken.bank, top_k, g);
  if (broken.exit) return a;
  return alpha * g + (1.0 - alpha) * a;
}

std::vector<RegainMatch> regain(
    const std::vector<Box3D>& detections,
    const std::vector<std::vector<Feature>>& det_features,
    const std::vector<BrokenTrack>& broken, const FieldModel& field, long now,
    double dt, double alpha, int top_k, double threshold, double v_max,
    double r0, bool use_geometry_constraint) {
  if (det_features.size() != detections.size())
    throw std::invalid_argument("regain: detections and features disagree");

  struct Candidate {
    double score;
    int track_id;
    Eigen::Vector3d det_center;
    int det_index;
    size_t broken_index;
  };
  std::vector<Candidate> candidates;
  for (size_t b = 0; b < broken.size(); ++b) {
    for (size_t d = 0; d < detections.size(); ++d) {
      const bool ok = !use_geometry_constraint ||
                      geometry_constraint(detections[d], broken[b], field, now,
                                          dt, v_max, r0);
      const double s = regain_score(detections[d], det_features[d], broken[b],
                                    alpha, top_k, ok);
      if (s > threshold)
        candidates.push_back({s, broken[b].id, detections[d].center,
                              static_cast<int>(d), b});
    }
  }

  // ordering keyed on score, track id, then detection center so the result
  // does not depend on input permutation
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.track_id != b.track_id) return a.track_id < b.track_id;
              return std::lexicographical_compare(
                  a.det_center.data(), a.det_center.data() + 3,
                  b.det_center.data(), b.det_center.data() + 3);
            });

  std::vector<char> det_used(detections.size(), 0);
  std::vector<char> broken_used(broken.size(), 0);
  std::vector<RegainMatch> out;
  for (const Candidate& c : candidates) {
    if (det_used[c.det_index] || broken_used[c.broken_index]) continue;
    det_used[c.det_index] = 1;
    broken_used[c.broken_index] = 1;
    out.push_back({c.det_index, c.track_id, c.score});
  }
  return out;
}

std::vector<std::pair<long, Box3D>> interpolate_gap(long frame0,
                                                    const Box3D& box0,
                                                    long frame1,
                                                    const Box3D& box1) {
  if (frame1 <= frame0)
    throw std::invalid_argument("interpolate_gap: endpoints out of order");
  std::vector<std::pair<long, Box3D>> out;
  const double span = static_cast<double>(frame1 - frame0);
  const double dyaw = wrap_angle(box1.yaw - box0.yaw);
  for (long f = frame0 + 1; f < frame1; ++f) {
    const double t = static_cast<double>(f - frame0) / span;
    out.emplace_back(f, Box3D(box0.center + t * (box1.center - box0.center),
                              box0.dims + t * (box1.dims - box0.dims),
                              box0.yaw + t * dyaw));
  }
  return out;
}

}  // namespace courttrack
