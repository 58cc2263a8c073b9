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
#include <fstream>
#include <set>

#include "tlp/harness.hpp"

namespace tlp {
namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

Eigen::Vector4d read_vec4(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 4) throw ConfigError(std::string(what) + " needs four numbers");
  Eigen::Vector4d v;
  for (int i = 0; i < 4; ++i) {
    if (!j[static_cast<std::size_t>(i)].is_number()) throw ConfigError(std::string(what) + " needs four numbers");
    v(i) = j[static_cast<std::size_t>(i)].get<double>();
  }
  if (!v.allFinite()) throw ConfigError(std::string(what) + " must be finite");
  return v;
}

json vec4(const Eigen::Vector4d& v) { return json::array({v(0), v(1), v(2), v(3)}); }

ModelParams read_model(const json& j) {
  if (j.is_string()) {
    const Preset p = preset_from_name(j.get<std::string>());
    if (p == Preset::kid) return ModelParams::kid();
    if (p == Preset::adult) return ModelParams::adult();
    throw ConfigError("a custom model needs its parameters");
  }
  check_keys(j, {"preset", "pelvis_mass", "leg_mass", "h1", "h2", "half_width", "leg_length", "gravity"}, "model");
  std::string base = "adult";
  read(j, "preset", base);
  ModelParams p = preset_from_name(base) == Preset::kid ? ModelParams::kid() : ModelParams::adult();
  const ModelParams ref = p;
  read(j, "pelvis_mass", p.pelvis_mass);
  read(j, "leg_mass", p.leg_mass);
  read(j, "h1", p.h1);
  read(j, "h2", p.h2);
  read(j, "half_width", p.half_width);
  read(j, "leg_length", p.leg_length);
  read(j, "gravity", p.gravity);
  const bool changed = p.pelvis_mass != ref.pelvis_mass || p.leg_mass != ref.leg_mass || p.h1 != ref.h1 ||
                       p.h2 != ref.h2 || p.half_width != ref.half_width || p.leg_length != ref.leg_length ||
                       p.gravity != ref.gravity;
  if (changed || base == "custom") p.preset = Preset::custom;
  p.validate();
  return p;
}

TimingSpec read_timing(const json& j) {
  check_keys(j, {"mode", "t_ds", "t_ss", "frequency", "ds_fraction", "steps_per_stride"}, "timing");
  TimingSpec t;
  std::string mode = "pseudo_passive";
  read(j, "mode", mode);
  if (mode == "pseudo_passive") t.mode = TimingMode::pseudo_passive;
  else if (mode == "frequency") t.mode = TimingMode::frequency;
  else if (mode == "fixed") t.mode = TimingMode::fixed;
  else throw ConfigError("unknown timing mode: " + mode);
  read(j, "t_ds", t.t_ds);
  read(j, "t_ss", t.t_ss);
  read(j, "frequency", t.frequency);
  read(j, "ds_fraction", t.ds_fraction);
  read(j, "steps_per_stride", t.steps_per_stride);
  if (!(t.t_ds > 0.0) || !(t.t_ss > 0.0) || !(t.frequency > 0.0) || !(t.ds_fraction > 0.0 && t.ds_fraction < 1.0))
    throw ConfigError("timing values out of range");
  if (t.steps_per_stride < 4) throw ConfigError("steps_per_stride must be at least 4");
  return t;
}

const char* timing_mode_name(TimingMode m) {
  switch (m) {
    case TimingMode::pseudo_passive: return "pseudo_passive";
    case TimingMode::frequency: return "frequency";
    case TimingMode::fixed: return "fixed";
  }
  return "pseudo_passive";
}

}  // namespace

void PushEvent::validate() const {
  if (!w.allFinite() || !std::isfinite(t_start) || !std::isfinite(t_end)) throw ConfigError("push must be finite");
  if (!(t_start < t_end)) throw ConfigError("push must end after it starts");
  if (t_start < 0.0) throw ConfigError("push cannot start before the run");
}

std::string scenario_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::speed_tracking: return "speed_tracking";
    case ScenarioKind::stride_push: return "stride_push";
    case ScenarioKind::intermittent: return "intermittent";
    case ScenarioKind::benchmark: return "benchmark";
  }
  return "benchmark";
}

ScenarioKind scenario_from_name(const std::string& name) {
  if (name == "speed_tracking") return ScenarioKind::speed_tracking;
  if (name == "stride_push") return ScenarioKind::stride_push;
  if (name == "intermittent") return ScenarioKind::intermittent;
  if (name == "benchmark") return ScenarioKind::benchmark;
  throw ConfigError("unknown scenario: " + name);
}

RunConfig config_from_json(const json& j) {
  check_keys(j, {"model", "timing", "speed", "controller", "updates_per_stride", "seed", "scenario"}, "config");
  RunConfig c;
  if (j.contains("model")) c.params = read_model(j.at("model"));
  if (j.contains("timing")) c.timing = read_timing(j.at("timing"));
  read(j, "speed", c.speed);
  if (!std::isfinite(c.speed) || c.speed < 0.0) throw ConfigError("speed must be finite and non-negative");
  std::string ctrl = c.controller.tag();
  read(j, "controller", ctrl);
  c.controller = ControllerSpec::parse(ctrl);
  read(j, "updates_per_stride", c.controller.updates_per_stride);
  if (c.controller.updates_per_stride < 0) throw ConfigError("updates_per_stride must be non-negative");
  read(j, "seed", c.seed);
  if (!j.contains("scenario")) return c;

  const json& s = j.at("scenario");
  check_keys(s, {"kind", "strides", "keep_steps", "profile", "push", "push_stride", "pushes", "push_count",
                 "max_force", "rezero_on_divergence"},
             "scenario");
  std::string kind = scenario_name(c.scenario);
  read(s, "kind", kind);
  c.scenario = scenario_from_name(kind);
  read(s, "strides", c.strides);
  read(s, "keep_steps", c.keep_steps);
  if (s.contains("profile")) {
    const json& p = s.at("profile");
    if (!p.is_array()) throw ConfigError("profile must be a list of [time, speed] pairs");
    for (const json& e : p) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw ConfigError("profile must be a list of [time, speed] pairs");
      c.profile.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
  }
  if (s.contains("push")) c.stride_push = read_vec4(s.at("push"), "push");
  read(s, "push_stride", c.push_stride);
  if (s.contains("pushes")) {
    const json& p = s.at("pushes");
    if (!p.is_array()) throw ConfigError("pushes must be a list");
    for (const json& e : p) {
      check_keys(e, {"w", "t_start", "t_end"}, "push event");
      PushEvent ev;
      if (e.contains("w")) ev.w = read_vec4(e.at("w"), "push force");
      read(e, "t_start", ev.t_start);
      read(e, "t_end", ev.t_end);
      ev.validate();
      c.pushes.push_back(ev);
    }
  }
  c.bench.strides = c.strides;
  if (c.scenario == ScenarioKind::benchmark && !s.contains("strides")) c.bench.strides = BenchmarkOptions{}.strides;
  read(s, "push_count", c.bench.pushes);
  read(s, "max_force", c.bench.max_force);
  read(s, "rezero_on_divergence", c.bench.rezero_on_divergence);

  if (c.strides < 1 || c.bench.strides < 1) throw ConfigError("strides must be positive");
  if (c.bench.pushes < 0 || !(c.bench.max_force >= 0.0)) throw ConfigError("benchmark push settings out of range");
  if (c.push_stride < 0) throw ConfigError("push_stride must be non-negative");
  for (std::size_t i = 0; i < c.profile.size(); ++i) {
    if (!(c.profile[i].second >= 0.0) || !std::isfinite(c.profile[i].first))
      throw ConfigError("profile speeds must be non-negative");
    if (i > 0 && !(c.profile[i].first > c.profile[i - 1].first))
      throw ConfigError("profile times must increase");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return config_from_json(j);
}

json config_to_json(const RunConfig& c) {
  json model = {{"preset", preset_name(c.params.preset)},
                {"pelvis_mass", c.params.pelvis_mass},
                {"leg_mass", c.params.leg_mass},
                {"h1", c.params.h1},
                {"h2", c.params.h2},
                {"half_width", c.params.half_width},
                {"leg_length", c.params.leg_length},
                {"gravity", c.params.gravity}};
  json timing = {{"mode", timing_mode_name(c.timing.mode)},
                 {"t_ds", c.timing.t_ds},
                 {"t_ss", c.timing.t_ss},
                 {"frequency", c.timing.frequency},
                 {"ds_fraction", c.timing.ds_fraction},
                 {"steps_per_stride", c.timing.steps_per_stride}};
  json profile = json::array();
  for (const auto& [t, v] : c.profile) profile.push_back({t, v});
  json pushes = json::array();
  for (const PushEvent& p : c.pushes) pushes.push_back({{"w", vec4(p.w)}, {"t_start", p.t_start}, {"t_end", p.t_end}});
  json scenario = {{"kind", scenario_name(c.scenario)},
                   {"strides", c.scenario == ScenarioKind::benchmark ? c.bench.strides : c.strides},
                   {"keep_steps", c.keep_steps},
                   {"profile", profile},
                   {"push", vec4(c.stride_push)},
                   {"push_stride", c.push_stride},
                   {"pushes", pushes},
                   {"push_count", c.bench.pushes},
                   {"max_force", c.bench.max_force},
                   {"rezero_on_divergence", c.bench.rezero_on_divergence}};
  return {{"model", model},
          {"timing", timing},
          {"speed", c.speed},
          {"controller", c.controller.tag()},
          {"updates_per_stride", c.controller.updates_per_stride},
          {"seed", c.seed},
          {"scenario", scenario}};
}

}  // namespace tlp
