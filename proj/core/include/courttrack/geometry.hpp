#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <vector>

namespace courttrack {

// wraps an angle to [-pi, pi)
double wrap_angle(double a);

/**
 * Oriented 3D box: center, dims (length, width, height) and yaw about the
 * vertical axis. Length runs along the local x axis at yaw = 0.
 */
struct Box3D {
  Eigen::Vector3d center{0.0, 0.0, 0.0};
  Eigen::Vector3d dims{1.0, 1.0, 1.0};
  double yaw = 0.0;

  Box3D() = default;
  // throws std::invalid_argument on non-positive dims or non-finite fields
  Box3D(const Eigen::Vector3d& c, const Eigen::Vector3d& d, double yaw_in);

  double volume() const { return dims.x() * dims.y() * dims.z(); }
  // footprint corners in counterclockwise order
  std::array<Eigen::Vector2d, 4> bev_corners() const;
  std::array<Eigen::Vector3d, 8> corners() const;
};

/** Axis-aligned image rectangle with the camera-frame depth of its source. */
struct Box2D {
  Eigen::Vector2d lo{0.0, 0.0};
  Eigen::Vector2d hi{0.0, 0.0};
  double depth = 1.0;

  Box2D() = default;
  // throws std::invalid_argument unless lo <= hi componentwise and depth > 0
  Box2D(const Eigen::Vector2d& lo_in, const Eigen::Vector2d& hi_in, double depth_in);

  double area() const { return (hi.x() - lo.x()) * (hi.y() - lo.y()); }
};

/** Pinhole camera: intrinsics plus world-to-camera rotation/translation. */
struct CameraModel {
  double fx = 1.0, fy = 1.0, cx = 0.0, cy = 0.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double width = 0.0, height = 0.0;

  // throws std::invalid_argument on non-positive focal lengths / image size
  // or a rotation that is not orthonormal within 1e-9
  void validate() const;

  Eigen::Vector3d to_camera(const Eigen::Vector3d& p_world) const {
    return rotation * p_world + translation;
  }
};

// overlap of the rotated footprints (Sutherland-Hodgman polygon clipping)
double bev_intersection_area(const Box3D& a, const Box3D& b);

// volumetric IoU of two yaw-rotated boxes; 0 when disjoint
double iou3d(const Box3D& a, const Box3D& b);

// IoU plus a center-distance penalty, normalized by the squared distance of
// the farthest pair of corners. Range [0, 1]; 1 only for identical boxes.
double diou3d(const Box3D& a, const Box3D& b);

double iou2d(const Box2D& a, const Box2D& b);

// Image-plane rectangle of the box, clipped to the image. Empty when the box
// center (or any corner) is behind the camera or the rectangle leaves the
// image entirely.
std::optional<Box2D> project_box(const Box3D& box, const CameraModel& cam);

// For each pair overlapping above the threshold, the deeper box is flagged
// false. Flags depend only on box geometry, not on input order.
std::vector<bool> occlusion_filter(const std::vector<Box2D>& boxes,
                                   double iou_threshold);

}  // namespace courttrack
