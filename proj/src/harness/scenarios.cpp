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
#include <algorithm>
#include <cmath>
#include <random>

#include "tlp/harness.hpp"

namespace tlp {
namespace {

constexpr double kTimeEps = 1e-9;

// Shared stride loop: keeps the stride summaries and running sums that
// become the aggregates.
class Runner {
 public:
  Runner(const Setup& s, ScenarioKind kind, bool keep_steps) : setup_(s), keep_(keep_steps) {
    rec_.scenario = scenario_name(kind);
    rec_.controller = s.ctrl.tag;
    restart();
  }

  void restart() { ep_ = std::make_unique<Episode>(setup_.grid, current_, setup_.ctrl); }
  void set_gait(const PeriodicGait& g) {
    current_ = g;
    ep_->set_gait(g);
  }
  double stride_time() const { return setup_.grid->timing().stride(); }

  // `offset` shifts the episode's stride counter to run time after restarts.
  const StrideRecord& stride(const PushFn& push, int offset = 0) {
    log_.clear();
    const PushFn shifted = [&](int s, int j, double t) { return push(s + offset, j, t + offset * stride_time()); };
    StrideRecord r = ep_->run_stride(offset == 0 ? push : shifted, &log_);
    r.stride = static_cast<int>(rec_.strides.size());
    for (StepRecord& st : log_) {
      st.stride = r.stride;
      st.time += offset * stride_time();
      sum_u_ += st.u_extra.norm();
      ++rec_.step_count;
      if (keep_) rec_.steps.push_back(st);
    }
    sum_e_ += r.error_norm;
    rec_.peak_error = std::max(rec_.peak_error, r.error_norm);
    rec_.target_speed.push_back(current_.speed);
    rec_.strides.push_back(r);
    return rec_.strides.back();
  }

  RunRecord finish() {
    const auto n = static_cast<double>(rec_.strides.size());
    rec_.mean_error = n > 0 ? sum_e_ / n : 0.0;
    rec_.mean_input = rec_.step_count > 0 ? sum_u_ / static_cast<double>(rec_.step_count) : 0.0;
    return std::move(rec_);
  }

  RunRecord& record() { return rec_; }

 private:
  const Setup& setup_;
  bool keep_;
  PeriodicGait current_ = setup_.gait;
  std::unique_ptr<Episode> ep_;
  std::vector<StepRecord> log_;
  RunRecord rec_;
  double sum_e_ = 0.0;
  double sum_u_ = 0.0;
};

PushFn events_fn(const std::vector<PushEvent>& events) {
  return [&events](int, int, double t) {
    Eigen::Vector4d w = Eigen::Vector4d::Zero();
    for (const PushEvent& e : events)
      if (t >= e.t_start - kTimeEps && t < e.t_end - kTimeEps) w += e.w;
    return w;
  };
}

int stride_of(double t, double stride_time) { return static_cast<int>(std::floor(t / stride_time + kTimeEps)); }

}  // namespace

GaitTiming resolve_timing(const ModelParams& params, const TimingSpec& spec) {
  switch (spec.mode) {
    case TimingMode::pseudo_passive:
      return pseudo_passive_timing(params, spec.t_ds, spec.steps_per_stride).gait.timing;
    case TimingMode::frequency:
      return GaitTiming::from_frequency(spec.frequency, spec.ds_fraction, spec.steps_per_stride);
    case TimingMode::fixed:
      return GaitTiming::make(spec.t_ds, spec.t_ss, spec.steps_per_stride);
  }
  throw ConfigError("unknown timing mode");
}

Setup make_setup(const ModelParams& params, const TimingSpec& timing, double speed, const ControllerSpec& ctrl) {
  params.validate();
  Setup s;
  s.params = params;
  if (timing.mode == TimingMode::pseudo_passive) {
    const PseudoPassiveResult pp = pseudo_passive_timing(params, timing.t_ds, timing.steps_per_stride);
    s.base = pp.gait;
  } else {
    s.base = periodic_gait(params, resolve_timing(params, timing), 1.0);
  }
  s.grid = std::make_shared<const ControlGrid>(params, s.base.timing);
  s.gait = scale_gait(s.base, speed);
  s.ctrl = make_controller(ctrl, s.grid->model_ptr());
  return s;
}

Setup make_setup(const RunConfig& cfg) { return make_setup(cfg.params, cfg.timing, cfg.speed, cfg.controller); }

RunRecord run_speed_tracking(const Setup& s, const std::vector<std::pair<double, double>>& profile, int strides,
                             bool keep_steps) {
  if (strides < 1) throw ConfigError("strides must be positive");
  Runner run(s, ScenarioKind::speed_tracking, keep_steps);
  const double period = run.stride_time();
  std::vector<int> changes;
  double target = s.gait.speed;
  for (int k = 0; k < strides; ++k) {
    const double t0 = k * period;
    double want = target;
    for (const auto& [t, v] : profile)
      if (t <= t0 + kTimeEps) want = v;
    if (k == 0 && !profile.empty() && profile.front().first > t0 + kTimeEps) want = profile.front().second;
    if (want != target || (k == 0 && want != s.gait.speed)) {
      run.set_gait(scale_gait(s.base, want));
      target = want;
      changes.push_back(k);
    }
    if (run.stride(no_push).diverged) {
      run.record().aborted = true;
      break;
    }
  }
  RunRecord r = run.finish();
  const int done = static_cast<int>(r.strides.size());
  for (std::size_t c = 0; c < changes.size(); ++c) {
    const int from = changes[c];
    const int to = c + 1 < changes.size() ? changes[c + 1] : done;
    int settled = -1;
    for (int k = to - 1; k >= from; --k) {
      const double v = r.target_speed[static_cast<std::size_t>(k)];
      const double tol = kSettleFraction * std::max(std::abs(v), 1e-9);
      if (std::abs(r.strides[static_cast<std::size_t>(k)].speed - v) > tol) break;
      settled = k;
    }
    r.convergence_strides.push_back(settled < 0 ? -1 : settled - from + 1);
  }
  return r;
}

RunRecord run_stride_push(const Setup& s, const Eigen::Vector4d& w, int push_stride, int strides, bool keep_steps) {
  if (strides <= push_stride || push_stride < 0) throw ConfigError("the push stride must lie inside the run");
  if (!w.allFinite()) throw ConfigError("push must be finite");
  Runner run(s, ScenarioKind::stride_push, keep_steps);
  const PushFn push = [&](int stride, int, double) { return stride == push_stride ? w : Eigen::Vector4d::Zero(); };
  for (int k = 0; k < strides; ++k) {
    if (run.stride(push).diverged) {
      run.record().aborted = true;
      break;
    }
  }
  RunRecord r = run.finish();
  PushEvent ev;
  ev.w = w;
  ev.t_start = push_stride * s.grid->timing().stride();
  ev.t_end = ev.t_start + s.grid->timing().stride();
  r.pushes.push_back(ev);
  double peak = 0.0;
  for (std::size_t k = static_cast<std::size_t>(push_stride); k < r.strides.size(); ++k)
    peak = std::max(peak, r.strides[k].error_norm);
  r.push_peaks.push_back(peak);
  // Rounding-level errors count as recovered at once.
  const double bar = std::max(kSettleFraction * peak, 1e-9);
  for (std::size_t k = static_cast<std::size_t>(push_stride); k < r.strides.size(); ++k) {
    if (r.strides[k].error_norm <= bar) {
      r.recovery_strides = static_cast<int>(k) - push_stride;
      break;
    }
  }
  return r;
}

RunRecord run_intermittent(const Setup& s, const std::vector<PushEvent>& pushes, int strides, bool keep_steps) {
  if (strides < 1) throw ConfigError("strides must be positive");
  for (const PushEvent& p : pushes) p.validate();
  Runner run(s, ScenarioKind::intermittent, keep_steps);
  const PushFn push = events_fn(pushes);
  for (int k = 0; k < strides; ++k) {
    if (run.stride(push).diverged) {
      run.record().aborted = true;
      break;
    }
  }
  RunRecord r = run.finish();
  r.pushes = pushes;
  const double period = s.grid->timing().stride();
  for (const PushEvent& p : pushes) {
    const int a = stride_of(p.t_start, period);
    const int b = std::min(stride_of(p.t_end, period) + 2, static_cast<int>(r.strides.size()) - 1);
    double peak = 0.0;
    for (int k = a; k <= b; ++k) peak = std::max(peak, r.strides[static_cast<std::size_t>(k)].error_norm);
    r.push_peaks.push_back(peak);
  }
  return r;
}

std::vector<PushEvent> benchmark_pushes(std::uint64_t seed, const BenchmarkOptions& opt, double stride_time) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> force(-opt.max_force, opt.max_force);
  std::uniform_real_distribution<double> start(0.0, opt.strides * stride_time);
  std::uniform_real_distribution<double> share(0.0, 1.0);
  std::vector<PushEvent> out;
  out.reserve(static_cast<std::size_t>(opt.pushes));
  for (int i = 0; i < opt.pushes; ++i) {
    PushEvent p;
    p.w(0) = force(rng);
    p.w(1) = force(rng);
    p.t_start = start(rng);
    // Duration in (0, stride].
    p.t_end = p.t_start + (1.0 - share(rng)) * stride_time;
    out.push_back(p);
  }
  std::stable_sort(out.begin(), out.end(), [](const PushEvent& a, const PushEvent& b) { return a.t_start < b.t_start; });
  return out;
}

RunRecord run_benchmark(const Setup& s, std::uint64_t seed, const BenchmarkOptions& opt, bool keep_steps) {
  if (opt.strides < 1 || opt.pushes < 0) throw ConfigError("benchmark needs positive strides");
  const double period = s.grid->timing().stride();
  const std::vector<PushEvent> pushes = benchmark_pushes(seed, opt, period);
  Runner run(s, ScenarioKind::benchmark, keep_steps);
  // Pushes overlapping the current stride, kept small for the inner loop.
  std::vector<PushEvent> active;
  const PushFn push = events_fn(active);
  int offset = 0;
  for (int k = 0; k < opt.strides; ++k) {
    active.clear();
    const double t0 = k * period;
    for (const PushEvent& p : pushes)
      if (p.t_start < t0 + period && p.t_end > t0) active.push_back(p);
    if (run.stride(push, offset).diverged) {
      ++run.record().divergences;
      if (!opt.rezero_on_divergence) {
        run.record().aborted = true;
        break;
      }
      run.restart();
      offset = k + 1;
    }
  }
  RunRecord r = run.finish();
  r.seed = seed;
  r.pushes = pushes;
  return r;
}

RunRecord run_scenario(const RunConfig& cfg) {
  const Setup s = make_setup(cfg);
  switch (cfg.scenario) {
    case ScenarioKind::speed_tracking: return run_speed_tracking(s, cfg.profile, cfg.strides, cfg.keep_steps);
    case ScenarioKind::stride_push:
      return run_stride_push(s, cfg.stride_push, cfg.push_stride, cfg.strides, cfg.keep_steps);
    case ScenarioKind::intermittent: return run_intermittent(s, cfg.pushes, cfg.strides, cfg.keep_steps);
    case ScenarioKind::benchmark: {
      RunRecord r = run_benchmark(s, cfg.seed, cfg.bench, cfg.keep_steps);
      return r;
    }
  }
  throw ConfigError("unknown scenario");
}

Aggregates recompute_aggregates(const RunRecord& r) {
  Aggregates a;
  double se = 0.0;
  for (const StrideRecord& s : r.strides) se += s.error_norm;
  double su = 0.0;
  for (const StepRecord& s : r.steps) su += s.u_extra.norm();
  a.mean_error = r.strides.empty() ? 0.0 : se / static_cast<double>(r.strides.size());
  a.mean_input = r.steps.empty() ? 0.0 : su / static_cast<double>(r.steps.size());
  return a;
}

}  // namespace tlp
