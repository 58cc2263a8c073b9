// Copyright 2026 The tlp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <array>
#include <cmath>

#include "tlp/gait.hpp"

namespace tlp {
namespace {

constexpr std::array<int, 3> kSagRows{0, 2, 4};
constexpr std::array<int, 3> kLatRows{1, 3, 5};
constexpr std::array<int, 3> kSagCols{ix::swing, ix::pelvis, ix::pelvis_vel};
constexpr std::array<int, 3> kLatCols{ix::swing + 1, ix::pelvis + 1, ix::pelvis_vel + 1};
// Roots where the foot constraint itself degenerates are not gaits.
constexpr double kGenuineCondLimit = 1e8;
// Nor are roots whose null vector has no step length (sway in place).
constexpr double kMinStepShare = 1e-3;

// Nominal constant hip torque implied by the foot-velocity constraint.
void fill_constraint_torque(Vec23& beta, const Mat23& h) {
  Vec23 q = beta;
  q.segment<2>(ix::hip).setZero();
  const Eigen::Vector2d rhs = h(Sel::swing_vel, Eigen::all) * q;
  beta.segment<2>(ix::hip) = -constraint_block(h).partialPivLu().solve(rhs);
}

// Lateral sway forced by the pelvis width at side d = +1.
Vec23 side_part(const Mat6x23& r, const Mat23& h) {
  Vec23 side = Vec23::Zero();
  side(ix::side) = 1.0;
  const Eigen::Matrix3d a = r(kLatRows, kLatCols);
  const Eigen::Vector3d b = -r(kLatRows, ix::side);
  Eigen::Vector3d x = a.completeOrthogonalDecomposition().solve(b);
  side(kLatCols) = x;
  if ((r * side).norm() > 1e-8 * (1.0 + b.norm())) {
    // Fall back on lateral hip actuation when passive sway is not periodic.
    Eigen::Matrix<double, 3, 4> a4;
    a4 << a, r(kLatRows, ix::hip_ramp + 1);
    const Eigen::Vector4d y = a4.completeOrthogonalDecomposition().solve(b);
    side(kLatCols) = y.head<3>();
    side(ix::hip_ramp + 1) = y(3);
  }
  fill_constraint_torque(side, h);
  return side;
}

PeriodicGait assemble(const Vec23& speed_part, const Vec23& side, const GaitTiming& timing,
                      double speed) {
  PeriodicGait g;
  g.side = side;
  g.beta = side + speed_part;
  g.timing = timing;
  g.speed = speed;
  const double torque = speed_part.segment<2>(ix::ankle).norm() + speed_part.segment<4>(ix::hip_ramp).norm() +
                        side.segment<2>(ix::ankle).norm() + side.segment<4>(ix::hip_ramp).norm();
  g.cls = torque < 1e-8 ? GaitClass::pseudo_passive : GaitClass::actuated;
  return g;
}

// Unit sagittal null vector of R at a root, ordered as kSagCols.
Eigen::Vector3d sagittal_null_vector(const Mat6x23& r) {
  const Eigen::Matrix3d rs = r(kSagRows, kSagCols);
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(rs, Eigen::ComputeFullV);
  return svd.matrixV().col(2);
}

}  // namespace

double pseudo_passive_residual(const ModelParams& params, double t_ds, double t_ss) {
  const GaitTiming timing = GaitTiming::make(t_ds, t_ss);
  const TransferMatrix h = stride_transfer(params, timing);
  const double c = constraint_block(h.m)(0, 0);
  // A singular block makes H' infinite; the product with c stays finite.
  if (constraint_condition(h.m) > kConstraintCondLimit)
    return pseudo_passive_residual(params, t_ds, t_ss * (1.0 + 1e-9));
  const Mat6x23 r = symmetry_operator(constrain_foot_velocity(h));
  const Eigen::Matrix3d rs = r(kSagRows, kSagCols);
  return c * rs.determinant();
}

PseudoPassiveResult pseudo_passive_timing(const ModelParams& params, double t_ds,
                                          int steps_per_stride, double lo, double hi) {
  if (!(t_ds > 0.0)) throw DomainError("double support duration must be positive");
  params.validate();
  constexpr int kSweep = 200;
  PseudoPassiveResult res;
  double best = -1.0;
  double prev_t = lo;
  double prev_f = pseudo_passive_residual(params, t_ds, lo);
  for (int i = 1; i < kSweep; ++i) {
    const double t = lo + (hi - lo) * i / (kSweep - 1);
    const double f = pseudo_passive_residual(params, t_ds, t);
    if (std::signbit(f) != std::signbit(prev_f)) {
      ++res.sign_changes;
      double a = prev_t, b = t, fa = prev_f;
      while (b - a > 1e-14 * std::max(1.0, b)) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double fm = pseudo_passive_residual(params, t_ds, m);
        if (std::signbit(fm) == std::signbit(fa)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      const double root = 0.5 * (a + b);
      const TransferMatrix h = stride_transfer(params, GaitTiming::make(t_ds, root));
      if (constraint_condition(h.m) < kGenuineCondLimit &&
          std::abs(sagittal_null_vector(symmetry_operator(constrain_foot_velocity(h)))(0)) > kMinStepShare) {
        ++res.genuine_roots;
        if (best < 0.0) best = root;
      }
    }
    prev_t = t;
    prev_f = f;
  }
  if (best < 0.0) throw NumericalError("no pseudo-passive timing in the bracket");

  res.t_ss = best;
  const GaitTiming timing = GaitTiming::make(t_ds, best, steps_per_stride);
  const TransferMatrix h = stride_transfer(params, timing);
  const TransferMatrix hc = constrain_foot_velocity(h);
  const Mat6x23 r = symmetry_operator(hc);
  const Eigen::Vector3d v = sagittal_null_vector(r);
  Vec23 speed_part = Vec23::Zero();
  speed_part(kSagCols) = v;
  // Walking direction: the trailing foot is behind the stance foot.
  speed_part *= -timing.stride() / speed_part(ix::swing);
  fill_constraint_torque(speed_part, h.m);
  res.gait = assemble(speed_part, side_part(r, h.m), timing, 1.0);
  res.gait.cls = GaitClass::pseudo_passive;
  return res;
}

PeriodicGait periodic_gait(const ModelParams& params, const GaitTiming& timing, double speed) {
  const TransferMatrix h = stride_transfer(params, timing);
  const TransferMatrix hc = constrain_foot_velocity(h);
  const Mat6x23 r = symmetry_operator(hc);
  Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
  a.topLeftCorner<3, 3>() = r(kSagRows, kSagCols);
  a.topRightCorner<3, 1>() = r(kSagRows, ix::hip_ramp);
  a(3, 0) = -1.0 / timing.stride();
  const Eigen::Vector4d b(0, 0, 0, 1);
  const Eigen::Vector4d x = a.completeOrthogonalDecomposition().solve(b);
  Vec23 unit = Vec23::Zero();
  unit(kSagCols) = x.head<3>();
  unit(ix::hip_ramp) = x(3);
  if ((r * unit).norm() > 1e-8 || std::abs(-unit(ix::swing) / timing.stride() - 1.0) > 1e-8)
    throw NumericalError("no sagittal periodic gait with hip-ramp actuation at this timing");
  fill_constraint_torque(unit, h.m);
  return assemble(speed * unit, side_part(r, h.m), timing, speed);
}

PeriodicGait scale_gait(const PeriodicGait& gait, double target_speed) {
  if (gait.speed == 0.0) throw DomainError("cannot rescale a zero-speed gait");
  PeriodicGait out = gait;
  out.beta = gait.side + (target_speed / gait.speed) * (gait.beta - gait.side);
  out.speed = target_speed;
  return out;
}

double stride_speed(const Vec23& q, const GaitTiming& timing) {
  return (q(ix::stance) - q(ix::swing)) / timing.stride();
}

}  // namespace tlp
