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
#include <cmath>
#include <limits>

#include "tlp/search.hpp"

namespace tlp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::array<FeedbackGain, 3> all_gains(const StrideGrid& g) {
  const ErrorSystem es = build_error_system(g.stride_constrained());
  std::array<FeedbackGain, 3> out;
  for (std::size_t i = 0; i < kVariants.size(); ++i) out[i] = design_gain(es, kVariants[i]);
  return out;
}

bool blown(double norm) { return !(norm <= kDivergenceNorm); }

}  // namespace

SearchModel make_search_model(const ModelParams& params, double t_ds, double speed, int steps_per_stride) {
  const PseudoPassiveResult pp = pseudo_passive_timing(params, t_ds, steps_per_stride);
  SearchModel m;
  m.params = params;
  m.grid = std::make_shared<const ControlGrid>(params, pp.gait.timing);
  m.gait = scale_gait(pp.gait, speed);
  m.gains = all_gains(m.grid->model());
  return m;
}

SearchModel make_search_model(const ModelParams& params, const GaitTiming& timing, double speed) {
  SearchModel m;
  m.params = params;
  m.grid = std::make_shared<const ControlGrid>(params, timing);
  m.gait = periodic_gait(params, timing, speed);
  m.gains = all_gains(m.grid->model());
  return m;
}

int sub_period_index(int j, int sub_periods, int steps) {
  return static_cast<int>(std::lround(static_cast<double>(steps) * j / sub_periods));
}

StrideMap probe_stride_map(const SearchModel& m, const Controller& ctrl) {
  StrideMap out;
  const int n = m.grid->steps();
  std::vector<Eigen::Matrix<double, 2, 6>> l(static_cast<std::size_t>(n));
  for (int i = 0; i < 6; ++i) {
    const Vec23 start = reconstruct_state(Vec6::Unit(i), Eigen::Vector2d::Zero(), m.gait.beta);
    Episode ep(m.grid, m.gait, ctrl, start);
    std::vector<StepRecord> log;
    log.reserve(static_cast<std::size_t>(n));
    out.phi.col(i) = ep.run_stride(no_push, &log).e;
    for (int j = 0; j < n; ++j) l[static_cast<std::size_t>(j)].col(i) = log[static_cast<std::size_t>(j)].u_extra;
  }
  for (const auto& lj : l) out.psi += lj.transpose() * lj;
  out.psi /= n;
  return out;
}

CostEvaluator::CostEvaluator(const SearchModel& model, Controller ctrl, double input_weight,
                             const SearchOptions& opt)
    : model_(model), ctrl_(std::move(ctrl)), r_(input_weight), opt_(opt), map_(probe_stride_map(model, ctrl_)) {}

CostPair CostEvaluator::tail(Vec6 e, int from_stride, CostPair acc) const {
  for (int s = from_stride; s < opt_.horizon; ++s) {
    acc.input += r_ * e.dot(map_.psi * e);
    e = map_.phi * e;
    const double n2 = e.squaredNorm();
    if (blown(std::sqrt(n2))) return {kInf, kInf};
    acc.state += n2;
  }
  return acc;
}

CostPair CostEvaluator::self_stability(int i) const { return self_stability(Vec6::Unit(i)); }

CostPair CostEvaluator::self_stability(const Vec6& e0) const {
  // With no disturbance every stride follows the probed map.
  return tail(e0, 0, CostPair{});
}

CostPair CostEvaluator::push(int j1, int j2, double magnitude) const {
  if (j1 < 0 || j2 <= j1 || j2 >= opt_.sub_periods) throw ConfigError("push window outside the stride");
  const int n = model_.grid->steps();
  const int a = sub_period_index(j1, opt_.sub_periods, n);
  const int b = sub_period_index(j2 + 1, opt_.sub_periods, n);
  const Eigen::Vector4d w(magnitude, 0.0, 0.0, 0.0);
  const PushFn push = [&](int stride, int j, double) {
    return stride == 0 && j >= a && j < b ? w : Eigen::Vector4d::Zero();
  };
  Episode ep(model_.grid, model_.gait, ctrl_);
  CostPair acc;
  // The disturbance estimate lingers into the second stride.
  const int full = std::min(2, opt_.horizon);
  StrideRecord rec;
  for (int s = 0; s < full; ++s) {
    rec = ep.run_stride(push);
    if (rec.diverged) return {kInf, kInf};
    acc.state += rec.error_norm * rec.error_norm;
    acc.input += r_ * rec.input_cost;
  }
  acc = tail(rec.e, full, acc);
  const double dj = j2 - j1;
  acc.input *= opt_.mu * dj * dj;
  return acc;
}

std::vector<double> CostEvaluator::all() const {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(2 * (6 + opt_.sub_periods * (opt_.sub_periods - 1) / 2)));
  for (int i = 0; i < 6; ++i) {
    const CostPair c = self_stability(i);
    v.push_back(c.state);
    v.push_back(c.input);
  }
  for (int j1 = 0; j1 < opt_.sub_periods; ++j1) {
    for (int j2 = j1 + 1; j2 < opt_.sub_periods; ++j2) {
      const CostPair c = push(j1, j2);
      v.push_back(c.state);
      v.push_back(c.input);
    }
  }
  return v;
}

}  // namespace tlp
