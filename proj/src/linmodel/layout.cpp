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

#include "tlp/linmodel.hpp"

namespace tlp {

ModelParams ModelParams::adult() { return ModelParams{}; }

ModelParams ModelParams::kid() {
  ModelParams p;
  constexpr double kLen = 0.55;
  constexpr double kMass = 0.25;
  p.pelvis_mass *= kMass;
  p.leg_mass *= kMass;
  p.h1 *= kLen;
  p.h2 *= kLen;
  p.half_width *= kLen;
  p.leg_length *= kLen;
  p.preset = Preset::kid;
  return p;
}

void ModelParams::validate() const {
  const double vals[] = {pelvis_mass, leg_mass, h1, h2, half_width, leg_length, gravity};
  for (double v : vals) {
    if (!std::isfinite(v) || v <= 0.0) throw ParamError("model parameters must be finite and positive");
  }
}

std::string preset_name(Preset p) {
  switch (p) {
    case Preset::adult: return "adult";
    case Preset::kid: return "kid";
    case Preset::custom: return "custom";
  }
  return "custom";
}

Preset preset_from_name(const std::string& name) {
  if (name == "adult") return Preset::adult;
  if (name == "kid") return Preset::kid;
  if (name == "custom") return Preset::custom;
  throw ConfigError("unknown model preset: " + name);
}

GaitTiming GaitTiming::make(double t_ds, double t_ss, int steps_per_stride) {
  if (!(t_ds >= 0.0) || !(t_ss >= 0.0) || t_ds + t_ss <= 0.0)
    throw DomainError("phase durations must be non-negative with a positive stride");
  if (steps_per_stride < 2) throw DomainError("need at least two steps per stride");
  GaitTiming g;
  g.t_ds = t_ds;
  g.t_ss = t_ss;
  const double total = t_ds + t_ss;
  g.n_ds = t_ds > 0.0 ? std::max(1, static_cast<int>(std::lround(steps_per_stride * t_ds / total))) : 0;
  g.n_ss = steps_per_stride - g.n_ds;
  if (t_ss > 0.0 && g.n_ss < 1) {
    g.n_ss = 1;
    g.n_ds = steps_per_stride - 1;
  }
  if (t_ss == 0.0) {
    g.n_ds = steps_per_stride;
    g.n_ss = 0;
  }
  return g;
}

GaitTiming GaitTiming::from_frequency(double freq, double ds_fraction, int steps_per_stride) {
  if (!(freq > 0.0) || !(ds_fraction > 0.0) || !(ds_fraction < 1.0))
    throw DomainError("frequency must be positive and the double-support fraction in (0, 1)");
  const double t = 1.0 / freq;
  return make(ds_fraction * t, (1.0 - ds_fraction) * t, steps_per_stride);
}

int GaitTiming::index_at(double t) const {
  constexpr double kEps = 1e-9;
  for (int j = 0; j < steps(); ++j)
    if (time_at(j) >= t - kEps) return j;
  return steps();
}

void GaitTiming::validate() const {
  if (!(t_ds > 0.0) || !(t_ss > 0.0)) throw DomainError("both phase durations must be positive");
  if (n_ds < 1 || n_ss < 1) throw DomainError("each phase needs at least one step");
  // Per-phase steps tile the phases exactly by construction.
  if (std::abs(n_ds * dt_ds() - t_ds) > 1e-12 || std::abs(n_ss * dt_ss() - t_ss) > 1e-12)
    throw DomainError("step grid does not tile the phases");
}

Vec23 relabel_at_touchdown(const Vec23& q) {
  Vec23 n = q;
  n.segment<2>(ix::swing) = q.segment<2>(ix::stance);
  n.segment<2>(ix::stance) = q.segment<2>(ix::swing);
  n.segment<2>(ix::swing_vel).setZero();
  for (int i : Sel::lateral) n(i) = -n(i);
  return n;
}

}  // namespace tlp
