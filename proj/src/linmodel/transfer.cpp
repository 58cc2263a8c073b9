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
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>

#include "tlp/linmodel.hpp"

namespace tlp {

TransferMatrix transfer_matrix(const PhaseDynamics& dyn, double t, double ramp_offset) {
  if (!(t >= 0.0)) throw DomainError("transfer duration must be non-negative");
  if (!(ramp_offset >= 0.0)) throw DomainError("ramp offset must be non-negative");
  TransferMatrix out;
  out.tag = dyn.phase == Phase::ds ? Span::ds : Span::ss;
  out.t_from = ramp_offset;
  out.t_to = ramp_offset + t;
  if (t == 0.0) return out;

  // Lift: canonical entries unchanged, ramp integrators start at offset * rU.
  Eigen::Matrix<double, kAugDim, kDim> lift = Eigen::Matrix<double, kAugDim, kDim>::Zero();
  lift.topRows<kDim>().setIdentity();
  for (int ax = 0; ax < 2; ++ax) {
    lift(kDim + ax, ix::hip_ramp + ax) = ramp_offset;
    lift(kDim + 2 + ax, ix::ankle_ramp + ax) = ramp_offset;
  }
  const MatAug flow = (dyn.generator * t).exp();
  out.m = (flow * lift).topRows<kDim>();
  return out;
}

TransferMatrix stride_transfer(const ModelParams& params, const GaitTiming& timing) {
  return partial_transfer(params, timing, timing.stride());
}

TransferMatrix partial_transfer(const ModelParams& params, const GaitTiming& timing, double t) {
  if (!(t >= 0.0) || t > timing.stride() + 1e-12) throw DomainError("time outside the stride");
  const PhaseDynamics ds = build_phase_dynamics(params, Phase::ds);
  TransferMatrix out;
  if (t <= timing.t_ds) {
    out = transfer_matrix(ds, t);
  } else {
    const PhaseDynamics ss = build_phase_dynamics(params, Phase::ss);
    out.m = transfer_matrix(ss, t - timing.t_ds).m * transfer_matrix(ds, timing.t_ds).m;
  }
  out.tag = Span::composed;
  out.t_from = 0.0;
  out.t_to = t;
  return out;
}

TransferMatrix remaining_transfer(const ModelParams& params, const GaitTiming& timing, double t) {
  if (!(t >= 0.0) || t >= timing.stride()) throw DomainError("remaining time origin outside [0, T_stride)");
  const PhaseDynamics ss = build_phase_dynamics(params, Phase::ss);
  TransferMatrix out;
  if (t < timing.t_ds) {
    const PhaseDynamics ds = build_phase_dynamics(params, Phase::ds);
    out.m = transfer_matrix(ss, timing.t_ss).m * transfer_matrix(ds, timing.t_ds - t, t).m;
  } else {
    const double off = t - timing.t_ds;
    out.m = transfer_matrix(ss, timing.t_ss - off, off).m;
  }
  out.tag = Span::composed;
  out.t_from = t;
  out.t_to = timing.stride();
  return out;
}

std::vector<TransferMatrix> step_matrices(const ModelParams& params, const GaitTiming& timing) {
  const PhaseDynamics ds = build_phase_dynamics(params, Phase::ds);
  const PhaseDynamics ss = build_phase_dynamics(params, Phase::ss);
  std::vector<TransferMatrix> out;
  out.reserve(static_cast<std::size_t>(timing.steps()));
  for (int j = 0; j < timing.steps(); ++j) {
    const bool in_ds = timing.phase_at(j) == Phase::ds;
    TransferMatrix g = transfer_matrix(in_ds ? ds : ss, timing.dt_at(j), timing.offset_at(j));
    g.t_from = timing.time_at(j);
    g.t_to = g.t_from + timing.dt_at(j);
    out.push_back(g);
  }
  return out;
}

Eigen::Matrix2d constraint_block(const Mat23& h) {
  return h(Sel::swing_vel, Sel::hip_const);
}

double constraint_condition(const Mat23& h) {
  const Eigen::Matrix2d blk = constraint_block(h);
  const Eigen::JacobiSVD<Eigen::Matrix2d> svd(blk);
  const double smin = svd.singularValues()(1);
  const double scale = h(Sel::swing_vel, Eigen::all).norm();
  if (smin <= 0.0 || !std::isfinite(smin)) return std::numeric_limits<double>::infinity();
  return scale / smin;
}

TransferMatrix constrain_foot_velocity(const TransferMatrix& h) {
  const double cond = constraint_condition(h.m);
  if (!(cond <= kConstraintCondLimit))
    throw ConstraintError("dedicated hip channels cannot stop the swing foot over this span", cond);
  const Eigen::Matrix2d blk = constraint_block(h.m);
  const Eigen::Matrix<double, kDim, 2> hs = h.m(Eigen::all, Sel::hip_const);
  const Eigen::Matrix<double, 2, kDim> sv = h.m(Sel::swing_vel, Eigen::all);
  TransferMatrix out = h;
  out.m = h.m - hs * blk.partialPivLu().solve(sv);
  out.constrained = true;
  return out;
}

}  // namespace tlp
