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

Eigen::Vector4d no_push(int, int, double) { return Eigen::Vector4d::Zero(); }

bool is_update_step(int j, int updates_per_stride, int steps) {
  if (updates_per_stride <= 0) return true;
  for (int k = 0; k < updates_per_stride; ++k)
    if (j == k * steps / updates_per_stride) return true;
  return false;
}

Controller make_open_loop() { return Controller{}; }

Controller make_dlqr(const FeedbackGain& gain) {
  Controller c;
  c.kind = ControllerKind::dlqr;
  c.k = gain.k;
  c.tag = "dlqr-" + variant_name(gain.variant);
  return c;
}

Controller make_ctpc(std::shared_ptr<const StrideGrid> grid, const FeedbackGain& gain,
                     const ProjectionConfig& cfg, const std::string& tag) {
  Controller c;
  c.kind = ControllerKind::ctpc;
  c.k = gain.k;
  c.policy = std::make_shared<const CtpcPolicy>(std::move(grid), gain.k, cfg);
  c.tag = tag.empty() ? "ctpc-" + cfg.str() + "-" + variant_name(gain.variant) : tag;
  return c;
}

Episode::Episode(std::shared_ptr<const ControlGrid> grid, const PeriodicGait& gait, Controller ctrl)
    : Episode(grid, gait, std::move(ctrl), gait.beta) {}

Episode::Episode(std::shared_ptr<const ControlGrid> grid, const PeriodicGait& gait, Controller ctrl,
                 const Vec23& start)
    : grid_(std::move(grid)), gait_(gait), ctrl_(std::move(ctrl)), q_(start) {
  if (ctrl_.kind == ControllerKind::ctpc && !ctrl_.policy) throw ConfigError("time-projecting controller without a policy");
}

StrideRecord Episode::run_stride(const PushFn& push, std::vector<StepRecord>* log) {
  const ControlGrid& g = *grid_;
  const GaitTiming& tm = g.timing();
  const Vec23& beta = gait_.beta;
  const Eigen::Vector4d mirror(1.0, parity_, 1.0, parity_);
  const double t0 = stride_ * tm.stride();

  StrideRecord rec;
  rec.stride = stride_;
  const Vec6 e_minus = error_vector(beta, q_);

  // Stride inputs: nominal torques, plus the once-per-stride DLQR correction.
  Eigen::Vector2d u_extra = Eigen::Vector2d::Zero();
  q_.segment<4>(ix::hip) = beta.segment<4>(ix::hip);
  q_.segment<4>(ix::hip_ramp) = beta.segment<4>(ix::hip_ramp);
  if (ctrl_.kind == ControllerKind::dlqr) {
    u_extra = -ctrl_.k * e_minus;
    q_.segment<2>(ix::hip_ramp) += u_extra;
  }
  const bool feedforward = ctrl_.kind != ControllerKind::ctpc && ctrl_.feedforward;
  const Eigen::Vector2d u_stride = u_extra;

  Vec23 q_prev;
  bool have_prev = false;
  double cost = 0.0;
  for (int j = 0; j < g.steps(); ++j) {
    const double t = tm.time_at(j);
    if (have_prev) {
      Vec23 base = q_prev;
      base.segment<4>(ix::force).setZero();
      w_est_ = g.observer_gain(j - 1) * (q_ - g.model().step(j - 1).m * base);
    }
    bool held = false;
    if (ctrl_.kind == ControllerKind::ctpc && is_update_step(j, ctrl_.updates_per_stride, g.steps())) {
      const PolicyResult pr = ctrl_.policy->solve(j, q_, w_est_, beta);
      if (pr.ok) {
        last_u1_ = pr.u1;
      } else {
        held = true;
      }
    }
    if (ctrl_.kind == ControllerKind::ctpc || feedforward) {
      u_extra = feedforward ? Eigen::Vector2d(u_stride + ctrl_.feedforward(stride_, j)) : last_u1_;
      q_.segment<2>(ix::hip_ramp) = beta.segment<2>(ix::hip_ramp) + u_extra;
    }
    if (g.constraint_valid(j)) {
      Vec23 qq = q_;
      qq.segment<4>(ix::force) = w_est_;
      last_uc_ = -g.constraint_gain(j) * qq;
    } else {
      held = true;
    }
    q_.segment<2>(ix::hip) = last_uc_;

    const Eigen::Vector4d w_true = push(stride_, j, t0 + t).cwiseProduct(mirror);
    q_.segment<4>(ix::force) = w_true;
    cost += u_extra.squaredNorm();
    if (log) {
      StepRecord s;
      s.stride = stride_;
      s.j = j;
      s.time = t0 + t;
      s.q = q_;
      s.e = e_minus;
      s.u_extra = u_extra;
      s.u_constraint = last_uc_;
      s.w_est = w_est_;
      s.w_true = w_true;
      s.held = held;
      log->push_back(s);
    }
    q_prev = q_;
    have_prev = true;
    q_ = g.model().step(j).m * q_;
  }

  q_ = relabel_at_touchdown(q_);
  q_.segment<4>(ix::force).setZero();
  parity_ = -parity_;
  // The estimate carries into the next stride expressed in the new frame.
  w_est_(1) = -w_est_(1);
  w_est_(3) = -w_est_(3);
  last_u1_.setZero();

  rec.e = error_vector(beta, q_);
  rec.error_norm = rec.e.norm();
  rec.speed = stride_speed(q_, tm);
  rec.input_cost = cost / g.steps();
  rec.diverged = !(rec.error_norm <= kDivergenceNorm) || !q_.allFinite();
  diverged_ = diverged_ || rec.diverged;
  ++stride_;
  return rec;
}

ConstantInputReport is_constant_input(std::shared_ptr<const ControlGrid> grid, const FeedbackGain& gain,
                                      const ProjectionConfig& cfg, const PeriodicGait& gait, double threshold) {
  const Controller ctrl = make_ctpc(grid->model_ptr(), gain, cfg);
  const GaitTiming& tm = grid->timing();
  ConstantInputReport rep;
  auto spread = [](const std::vector<StepRecord>& log, int from) {
    Eigen::Vector2d lo = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
    Eigen::Vector2d hi = -lo;
    for (std::size_t i = static_cast<std::size_t>(from); i < log.size(); ++i) {
      lo = lo.cwiseMin(log[i].u_extra);
      hi = hi.cwiseMax(log[i].u_extra);
    }
    return (hi - lo).maxCoeff();
  };

  {
    Vec23 start = gait.beta;
    start(ix::pelvis) += 0.01;
    start(ix::pelvis_vel + 1) += 0.02;
    Episode ep(grid, gait, ctrl, start);
    std::vector<StepRecord> log;
    ep.run_stride(no_push, &log);
    rep.variation_initial = spread(log, 0);
  }
  {
    const double t_on = 0.3 * tm.stride();
    const int j_on = tm.index_at(t_on);
    Episode ep(grid, gait, ctrl);
    std::vector<StepRecord> log;
    ep.run_stride(
        [&](int, int j, double) {
          return j >= j_on ? Eigen::Vector4d(10.0, 5.0, 0.0, 0.0) : Eigen::Vector4d::Zero();
        },
        &log);
    // The observer sees the disturbance one step after it starts.
    rep.variation_push = spread(log, j_on + 1);
  }
  rep.constant = rep.variation_initial < threshold && rep.variation_push < threshold;
  return rep;
}

}  // namespace tlp
