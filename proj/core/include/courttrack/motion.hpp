#pragma once

#include <Eigen/Dense>

#include "courttrack/geometry.hpp"

namespace courttrack {

// state layout: x y z yaw l w h vx vy vz
inline constexpr int kStateDim = 10;
inline constexpr int kMeasDim = 7;

struct KalmanParams {
  // process noise, variance per second, scaled by dt
  double process_var_pos = 0.01;
  double process_var_vel = 0.1;
  double process_var_shape = 1e-4;  // dims and yaw
  // measurement noise, standard deviations
  double meas_std_pos = 0.05;
  double meas_std_dims = 0.05;
  double meas_std_yaw = 0.1;
  // covariance of a freshly seeded state
  double init_var_pos = 1.0;
  double init_var_vel = 10.0;
  double init_var_shape = 0.1;
};

struct KalmanState {
  Eigen::Matrix<double, kStateDim, 1> mean =
      Eigen::Matrix<double, kStateDim, 1>::Zero();
  Eigen::Matrix<double, kStateDim, kStateDim> covariance =
      Eigen::Matrix<double, kStateDim, kStateDim>::Identity();

  static KalmanState from_box(const Box3D& box, const KalmanParams& params = {});

  Box3D to_box() const;
  Eigen::Vector3d position() const { return mean.head<3>(); }
  Eigen::Vector3d velocity() const { return mean.tail<3>(); }
};

// constant-velocity step over dt seconds; dims and yaw carry over unchanged
KalmanState predict(const KalmanState& state, double dt,
                    const KalmanParams& params = {});

// fuses a measured box; the yaw innovation is wrapped so updates never jump
// across the angular seam
KalmanState update(const KalmanState& state, const Box3D& measurement,
                   const KalmanParams& params = {});

}  // namespace courttrack
