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
#include <limits>

#include "tlp/ctpc.hpp"

namespace tlp {
namespace {

constexpr double kPinvCut = 1e-10;

struct Pinv {
  Eigen::Matrix<double, 4, kDim> m;
  int rank = 0;
  double condition = 0.0;
};

Pinv w_pinv(const Mat23& g) {
  const Eigen::Matrix<double, kDim, 4> gw = g(Eigen::all, Sel::w);
  Eigen::JacobiSVD<Eigen::Matrix<double, kDim, 4>> svd(gw, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector4d s = svd.singularValues();
  Pinv p;
  p.m.setZero();
  if (s(0) <= 0.0) return p;
  const double cut = kPinvCut * s(0);
  double smin = s(0);
  for (int i = 0; i < 4; ++i) {
    if (s(i) <= cut) continue;
    ++p.rank;
    smin = s(i);
    p.m += svd.matrixV().col(i) * (svd.matrixU().col(i).transpose() / s(i));
  }
  p.condition = s(0) / smin;
  return p;
}

Eigen::Matrix<double, 2, kDim> constraint_rows(const Mat23& g_rem, bool* valid) {
  Eigen::Matrix<double, 2, kDim> c = Eigen::Matrix<double, 2, kDim>::Zero();
  *valid = constraint_condition(g_rem) <= kConstraintCondLimit;
  if (!*valid) return c;
  c = constraint_block(g_rem).partialPivLu().solve(g_rem(Sel::swing_vel, Eigen::all));
  // The dedicated channels are the unknowns, not inputs.
  c.middleCols<2>(ix::hip).setZero();
  return c;
}

}  // namespace

ObserverState observe_disturbance(const Vec23& q_prev, const Vec23& q_now, const Mat23& g) {
  const Pinv p = w_pinv(g);
  if (p.rank == 0) throw NumericalError("disturbance columns of the step matrix vanish");
  Vec23 base = q_prev;
  base.segment<4>(ix::force).setZero();
  const Vec23 mismatch = q_now - g * base;
  ObserverState st;
  st.w_est = p.m * mismatch;
  st.residual = mismatch - g(Eigen::all, Sel::w) * st.w_est;
  st.rank = p.rank;
  st.condition = p.condition;
  return st;
}

Eigen::Vector2d constraint_hip_torque(const Vec23& q_now, const Eigen::Vector4d& w_est,
                                      const Mat23& g_rem) {
  bool valid = false;
  const Eigen::Matrix<double, 2, kDim> c = constraint_rows(g_rem, &valid);
  if (!valid)
    throw ConstraintError("remaining-time foot constraint is singular", constraint_condition(g_rem));
  Vec23 q = q_now;
  q.segment<4>(ix::force) = w_est;
  return -c * q;
}

ControlGrid::ControlGrid(const ModelParams& params, const GaitTiming& timing)
    : model_(std::make_shared<const StrideGrid>(params, timing)) {
  build();
}

ControlGrid::ControlGrid(std::shared_ptr<const StrideGrid> model) : model_(std::move(model)) { build(); }

void ControlGrid::build() {
  const int n = model_->steps();
  obs_.resize(static_cast<std::size_t>(n));
  cg_.resize(static_cast<std::size_t>(n));
  cvalid_.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const Pinv p = w_pinv(model_->step(j).m);
    if (p.rank == 0) throw NumericalError("disturbance columns of the step matrix vanish");
    obs_[static_cast<std::size_t>(j)] = p.m;
    bool valid = false;
    cg_[static_cast<std::size_t>(j)] = constraint_rows(model_->remaining(j).m, &valid);
    cvalid_[static_cast<std::size_t>(j)] = valid;
  }
}

}  // namespace tlp
