#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "courttrack/association.hpp"
#include "courttrack/geometry.hpp"

namespace courttrack {

/** Rectangular playing field with a margin band along each edge. */
struct FieldModel {
  double x_min = 0.0, x_max = 28.0;
  double y_min = 0.0, y_max = 15.0;
  double margin = 1.0;

  // throws std::invalid_argument on an empty extent or non-positive margin
  void validate() const;

  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
};

enum class Edge { North, South, East, West };  // y_max, y_min, x_max, x_min

// Edge whose margin band contains the position, nearest edge first, ties
// broken in the order N, S, E, W. Empty when no band applies.
std::optional<Edge> classify_exit(const Eigen::Vector3d& position,
                                  const FieldModel& field);

// search radius around a broken track, growing with time since the break
double local_area_radius(long broken_at, long now, double dt, double v_max,
                         double r0);

/** A track that lost its detection; carries what regain needs to score it. */
struct BrokenTrack {
  int id = 0;
  std::optional<Edge> exit;  // empty while the break happened inside the field
  Eigen::Vector3d last_position = Eigen::Vector3d::Zero();
  long broken_at = 0;
  Box3D predicted;                          // current motion-model box
  const FeatureMemoryBank* bank = nullptr;  // retained appearance memory
};

// Edge-exited tracks demand re-entry through the same edge band; tracks broken
// inside the field demand the detection within the growing local radius.
bool geometry_constraint(const Box3D& detection, const BrokenTrack& broken,
                         const FieldModel& field, long now, double dt,
                         double v_max, double r0);

// -1 when the constraint failed; appearance alone for edge exits; the alpha
// blend of diou3d against the predicted box and appearance otherwise
double regain_score(const Box3D& detection,
                    const std::vector<Feature>& det_features,
                    const BrokenTrack& broken, double alpha, int top_k,
                    bool constraint_ok);

struct RegainMatch {
  int detection = 0;  // index into the detection list
  int track = 0;      // broken-track id
  double score = 0.0;
};

// Greedy best-score matching of unmatched detections to broken tracks.
// Pairs scoring at or below the threshold never match; ties prefer the lower
// track id, then the lexicographically smaller detection center.
std::vector<RegainMatch> regain(
    const std::vector<Box3D>& detections,
    const std::vector<std::vector<Feature>>& det_features,
    const std::vector<BrokenTrack>& broken, const FieldModel& field, long now,
    double dt, double alpha, int top_k, double threshold, double v_max,
    double r0, bool use_geometry_constraint = true);

// Linear fill between two keyframe boxes, exclusive of both endpoints; yaw
// follows the shorter angular arc. Empty when the gap has no interior frames.
std::vector<std::pair<long, Box3D>> interpolate_gap(long frame0,
                                                    const Box3D& box0,
                                                    long frame1,
                                                    const Box3D& box1);

}  // namespace courttrack
