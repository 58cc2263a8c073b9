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
//
// Scenario runners, run configuration and telemetry output.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tlp/ctpc.hpp"

namespace tlp {

// ---------------------------------------------------------------- config

enum class TimingMode { pseudo_passive, frequency, fixed };

struct TimingSpec {
  TimingMode mode = TimingMode::pseudo_passive;
  double t_ds = 0.1;         // s; pseudo_passive and fixed
  double t_ss = 0.8;         // s; fixed
  double frequency = 1.8;    // step/s; frequency
  double ds_fraction = 0.2;  // frequency
  int steps_per_stride = 100;
};

struct PushEvent {
  Eigen::Vector4d w = Eigen::Vector4d::Zero();  // N, N, N m, N m (canonical frame)
  double t_start = 0.0;                         // s, absolute
  double t_end = 0.0;
  void validate() const;
};

struct BenchmarkOptions {
  int strides = 1000;
  int pushes = 100;
  double max_force = 20.0;           // N, per axis
  bool rezero_on_divergence = false; // otherwise the run aborts
};

enum class ScenarioKind { speed_tracking, stride_push, intermittent, benchmark };

struct RunConfig {
  ModelParams params = ModelParams::adult();
  TimingSpec timing;
  double speed = 0.5;  // m/s
  ControllerSpec controller;
  std::uint64_t seed = 1;
  ScenarioKind scenario = ScenarioKind::benchmark;
  int strides = 20;
  bool keep_steps = false;
  // speed tracking: (time s, speed m/s), ascending times
  std::vector<std::pair<double, double>> profile;
  // stride push
  Eigen::Vector4d stride_push = Eigen::Vector4d::Zero();
  int push_stride = 2;
  // intermittent
  std::vector<PushEvent> pushes;
  BenchmarkOptions bench;
};

// Missing keys keep their defaults. Throws ConfigError on bad types, unknown
// names or invalid values.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json config_to_json(const RunConfig& cfg);

std::string scenario_name(ScenarioKind k);
ScenarioKind scenario_from_name(const std::string& name);

// ---------------------------------------------------------------- runners

struct Setup {
  ModelParams params;
  std::shared_ptr<const ControlGrid> grid;
  PeriodicGait base;  // 1 m/s
  PeriodicGait gait;  // at the configured speed
  Controller ctrl;
};

GaitTiming resolve_timing(const ModelParams& params, const TimingSpec& spec);
Setup make_setup(const RunConfig& cfg);
Setup make_setup(const ModelParams& params, const TimingSpec& timing, double speed, const ControllerSpec& ctrl);

struct RunRecord {
  std::string scenario;
  std::string controller;
  std::uint64_t seed = 0;
  std::vector<StepRecord> steps;  // only when telemetry is kept
  std::vector<StrideRecord> strides;
  std::vector<double> target_speed;  // per stride
  double mean_error = 0.0;  // touch-down error norm averaged over strides
  double mean_input = 0.0;  // |u_extra| averaged over grid steps
  long long step_count = 0;
  int divergences = 0;
  bool aborted = false;
  double peak_error = 0.0;
  // Speed tracking: strides after each change until the speed settles within
  // 5 % of its target for good (-1 if never).
  std::vector<int> convergence_strides;
  // Stride push: strides after the push stride until the error drops below
  // 5 % of its post-push peak (-1 if never).
  int recovery_strides = -1;
  std::vector<PushEvent> pushes;
  std::vector<double> push_peaks;  // intermittent: peak error around each push
};

inline constexpr double kSettleFraction = 0.05;

RunRecord run_speed_tracking(const Setup& s, const std::vector<std::pair<double, double>>& profile, int strides,
                             bool keep_steps = false);
RunRecord run_stride_push(const Setup& s, const Eigen::Vector4d& w, int push_stride, int strides,
                          bool keep_steps = false);
RunRecord run_intermittent(const Setup& s, const std::vector<PushEvent>& pushes, int strides,
                           bool keep_steps = false);
RunRecord run_benchmark(const Setup& s, std::uint64_t seed, const BenchmarkOptions& opt = {},
                        bool keep_steps = false);
RunRecord run_scenario(const RunConfig& cfg);

// Random push schedule of the benchmark; a pure function of the seed.
std::vector<PushEvent> benchmark_pushes(std::uint64_t seed, const BenchmarkOptions& opt, double stride_time);

struct Aggregates {
  double mean_error = 0.0;
  double mean_input = 0.0;
};
// From stored telemetry; matches the record when steps were kept.
Aggregates recompute_aggregates(const RunRecord& r);

// ---------------------------------------------------------------- telemetry

enum class Format { csv, json };
Format format_from_name(const std::string& name);

// Header rows name every column with its unit; JSON output is one object per
// line with the same keys.
void write_steps(std::ostream& os, const RunRecord& r, Format f);
void write_strides(std::ostream& os, const RunRecord& r, Format f);
nlohmann::json summary_json(const RunRecord& r);

}  // namespace tlp
