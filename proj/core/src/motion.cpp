#include "courttrack/motion.hpp"

#include <stdexcept>

namespace courttrack {

namespace {

using StateVec = Eigen::Matrix<double, kStateDim, 1>;
using StateMat = Eigen::Matrix<double, kStateDim, kStateDim>;
using MeasMat = Eigen::Matrix<double, kMeasDim, kStateDim>;

MeasMat measurement_matrix() {
  MeasMat h = MeasMat::Zero();
  for (int i = 0; i < kMeasDim; ++i) h(i, i) = 1.0;
  return h;
}

void symmetrize(StateMat& m) { m = 0.5 * (m + m.transpose()).eval(); }

}  // namespace

KalmanState KalmanState::from_box(const Box3D& box, const KalmanParams& params) {
  KalmanState s;
  s.mean.head<3>() = box.center;
  s.mean(3) = box.yaw;
  s.mean.segment<3>(4) = box.dims;
  s.mean.tail<3>().setZero();
  StateVec d;
  d << params.init_var_pos, params.init_var_pos, params.init_var_pos,
      params.init_var_shape, params.init_var_shape, params.init_var_shape,
      params.init_var_shape, params.init_var_vel, params.init_var_vel,
      params.init_var_vel;
  s.covariance = d.asDiagonal();
  return s;
}

Box3D KalmanState::to_box() const {
  // dims can drift non-positive only through pathological updates; floor them
  Eigen::Vector3d dims = mean.segment<3>(4).cwiseMax(1e-6);
  return Box3D(mean.head<3>(), dims, mean(3));
}

KalmanState predict(const KalmanState& state, double dt,
                    const KalmanParams& params) {
  if (!(dt > 0.0)) throw std::invalid_argument("predict: dt must be positive");
  StateMat f = StateMat::Identity();
  f(0, 7) = dt;
  f(1, 8) = dt;
  f(2, 9) = dt;

  StateVec q;
  q << params.process_var_pos, params.process_var_pos, params.process_var_pos,
      params.process_var_shape, params.process_var_shape,
      params.process_var_shape, params.process_var_shape,
      params.process_var_vel, params.process_var_vel, params.process_var_vel;
  q *= dt;

  KalmanState out;
  out.mean = f * state.mean;
  out.mean(3) = wrap_angle(out.mean(3));
  out.covariance = f * state.covariance * f.transpose();
  out.covariance += StateMat(q.asDiagonal());
  symmetrize(out.covariance);
  return out;
}

KalmanState update(const KalmanState& state, const Box3D& measurement,
                   const KalmanParams& params) {
  static const MeasMat h = measurement_matrix();

  Eigen::Matrix<double, kMeasDim, 1> z;
  z.head<3>() = measurement.center;
  z(3) = measurement.yaw;
  z.tail<3>() = measurement.dims;

  Eigen::Matrix<double, kMeasDim, 1> r;
  r << params.meas_std_pos * params.meas_std_pos,
      params.meas_std_pos * params.meas_std_pos,
      params.meas_std_pos * params.meas_std_pos,
      params.meas_std_yaw * params.meas_std_yaw,
      params.meas_std_dims * params.meas_std_dims,
      params.meas_std_dims * params.meas_std_dims,
      params.meas_std_dims * params.meas_std_dims;

  Eigen::Matrix<double, kMeasDim, 1> innovation = z - h * state.mean;
  innovation(3) = wrap_angle(innovation(3));

  Eigen::Matrix<double, kMeasDim, kMeasDim> s_mat =
      h * state.covariance * h.transpose();
  s_mat += Eigen::Matrix<double, kMeasDim, kMeasDim>(r.asDiagonal());

  // gain via LDLT solve of S K^T = H P
  Eigen::Matrix<double, kStateDim, kMeasDim> gain =
      s_mat.ldlt().solve(h * state.covariance).transpose();

  KalmanState out;
  out.mean = state.mean + gain * innovation;
  out.mean(3) = wrap_angle(out.mean(3));

  // Joseph form keeps the covariance symmetric positive semidefinite
  const StateMat ikh = StateMat::Identity() - gain * h;
  out.covariance = ikh * state.covariance * ikh.transpose() +
                   gain * Eigen::Matrix<double, kMeasDim, kMeasDim>(r.asDiagonal()) *
                       gain.transpose();
  symmetrize(out.covariance);
  return out;
}

}  // namespace courttrack
