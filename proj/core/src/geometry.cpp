#include "courttrack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace courttrack {

namespace {

using Vec2 = Eigen::Vector2d;

double polygon_area(const std::vector<Vec2>& poly) {
  double s = 0.0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    s += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * std::abs(s);
}

// keeps the part of poly on or left of the directed line a -> b
std::vector<Vec2> clip_half_plane(const std::vector<Vec2>& poly, const Vec2& a,
                                  const Vec2& b) {
  std::vector<Vec2> out;
  const size_t n = poly.size();
  if (n == 0) return out;
  const Vec2 e = b - a;
  auto side = [&](const Vec2& p) {
    return e.x() * (p.y() - a.y()) - e.y() * (p.x() - a.x());
  };
  for (size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    const double sp = side(p);
    const double sq = side(q);
    if (sp >= 0.0) out.push_back(p);
    if ((sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0)) {
      const double t = sp / (sp - sq);
      out.push_back(p + t * (q - p));
    }
  }
  return out;
}

bool finite(const Eigen::Vector3d& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

}  // namespace

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a < 0.0) a += two_pi;
  return a - std::numbers::pi;
}

Box3D::Box3D(const Eigen::Vector3d& c, const Eigen::Vector3d& d, double yaw_in)
    : center(c), dims(d), yaw(wrap_angle(yaw_in)) {
  if (!finite(c) || !finite(d) || !std::isfinite(yaw_in))
    throw std::invalid_argument("Box3D: non-finite field");
  if (d.x() <= 0.0 || d.y() <= 0.0 || d.z() <= 0.0)
    throw std::invalid_argument("Box3D: dims must be positive");
}

std::array<Eigen::Vector2d, 4> Box3D::bev_corners() const {
  const double hl = 0.5 * dims.x();
  const double hw = 0.5 * dims.y();
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  const double lx[4] = {hl, -hl, -hl, hl};
  const double ly[4] = {hw, hw, -hw, -hw};
  std::array<Eigen::Vector2d, 4> out;
  for (int i = 0; i < 4; ++i)
    out[i] = Eigen::Vector2d(center.x() + c * lx[i] - s * ly[i],
                             center.y() + s * lx[i] + c * ly[i]);
  return out;
}

std::array<Eigen::Vector3d, 8> Box3D::corners() const {
  const auto bev = bev_corners();
  const double z0 = center.z() - 0.5 * dims.z();
  const double z1 = center.z() + 0.5 * dims.z();
  std::array<Eigen::Vector3d, 8> out;
  for (int i = 0; i < 4; ++i) {
    out[i] = Eigen::Vector3d(bev[i].x(), bev[i].y(), z0);
    out[i + 4] = Eigen::Vector3d(bev[i].x(), bev[i].y(), z1);
  }
  return out;
}

Box2D::Box2D(const Eigen::Vector2d& lo_in, const Eigen::Vector2d& hi_in,
             double depth_in)
    : lo(lo_in), hi(hi_in), depth(depth_in) {
  if (lo.x() > hi.x() || lo.y() > hi.y())
    throw std::invalid_argument("Box2D: min corner exceeds max corner");
  if (!(depth > 0.0)) throw std::invalid_argument("Box2D: depth must be positive");
}

void CameraModel::validate() const {
  if (fx <= 0.0 || fy <= 0.0)
    throw std::invalid_argument("CameraModel: focal lengths must be positive");
  if (width <= 0.0 || height <= 0.0)
    throw std::invalid_argument("CameraModel: image size must be positive");
  const Eigen::Matrix3d rtr = rotation.transpose() * rotation;
  if ((rtr - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("CameraModel: rotation is not orthonormal");
}

double bev_intersection_area(const Box3D& a, const Box3D& b) {
  const auto pa = a.bev_corners();
  const auto pb = b.bev_corners();
  std::vector<Vec2> poly(pa.begin(), pa.end());
  for (int i = 0; i < 4 && !poly.empty(); ++i)
    poly = clip_half_plane(poly, pb[i], pb[(i + 1) % 4]);
  return poly.size() < 3 ? 0.0 : polygon_area(poly);
}

double iou3d(const Box3D& a, const Box3D& b) {
  const double za0 = a.center.z() - 0.5 * a.dims.z();
  const double za1 = a.center.z() + 0.5 * a.dims.z();
  const double zb0 = b.center.z() - 0.5 * b.dims.z();
  const double zb1 = b.center.z() + 0.5 * b.dims.z();
  const double dz = std::min(za1, zb1) - std::max(za0, zb0);
  if (dz <= 0.0) return 0.0;
  const double inter = bev_intersection_area(a, b) * dz;
  if (inter <= 0.0) return 0.0;
  const double uni = a.volume() + b.volume() - inter;
  return inter / uni;
}

double diou3d(const Box3D& a, const Box3D& b) {
  const double iou = iou3d(a, b);
  const double center2 = (a.center - b.center).squaredNorm();
  const auto ca = a.corners();
  const auto cb = b.corners();
  double far2 = 0.0;
  for (const auto& p : ca)
    for (const auto& q : cb) far2 = std::max(far2, (p - q).squaredNorm());
  // far2 >= center2 > 0 whenever centers differ, and far2 > 0 always
  // because dims are positive
  return 0.5 * (iou - center2 / far2 + 1.0);
}

double iou2d(const Box2D& a, const Box2D& b) {
  const double w = std::min(a.hi.x(), b.hi.x()) - std::max(a.lo.x(), b.lo.x());
  const double h = std::min(a.hi.y(), b.hi.y()) - std::max(a.lo.y(), b.lo.y());
  if (w <= 0.0 || h <= 0.0) return 0.0;
  const double inter = w * h;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

std::optional<Box2D> project_box(const Box3D& box, const CameraModel& cam) {
  const Eigen::Vector3d center_cam = cam.to_camera(box.center);
  if (center_cam.z() <= 0.0) return std::nullopt;
  Eigen::Vector2d lo(std::numeric_limits<double>::max(),
                     std::numeric_limits<double>::max());
  Eigen::Vector2d hi = -lo;
  for (const auto& corner : box.corners()) {
    const Eigen::Vector3d p = cam.to_camera(corner);
    // boxes straddling the image plane are dropped rather than clipped
    if (p.z() <= 1e-9) return std::nullopt;
    const double u = cam.fx * p.x() / p.z() + cam.cx;
    const double v = cam.fy * p.y() / p.z() + cam.cy;
    lo.x() = std::min(lo.x(), u);
    lo.y() = std::min(lo.y(), v);
    hi.x() = std::max(hi.x(), u);
    hi.y() = std::max(hi.y(), v);
  }
  lo = lo.cwiseMax(Eigen::Vector2d::Zero());
  hi = hi.cwiseMin(Eigen::Vector2d(cam.width, cam.height));
  if (lo.x() >= hi.x() || lo.y() >= hi.y()) return std::nullopt;
  return Box2D(lo, hi, center_cam.z());
}

std::vector<bool> occlusion_filter(const std::vector<Box2D>& boxes,
                                   double iou_threshold) {
  std::vector<bool> valid(boxes.size(), true);
  for (size_t i = 0; i < boxes.size(); ++i) {
    for (size_t j = i + 1; j < boxes.size(); ++j) {
      if (iou2d(boxes[i], boxes[j]) <= iou_threshold) continue;
      // strictly deeper loses; exact depth ties keep both to stay
      // order-independent
      if (boxes[i].depth > boxes[j].depth)
        valid[i] = false;
      else if (boxes[j].depth > boxes[i].depth)
        valid[j] = false;
    }
  }
  return valid;
}

}  // namespace courttrack
