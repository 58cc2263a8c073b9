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
#include "tlp/linmodel.hpp"

namespace tlp {
namespace {

// Augmented integrator rows: hip ramps at 23..24, ankle ramps at 25..26.
constexpr int kRhoHip = kDim;
constexpr int kRhoAnkle = kDim + 2;

}  // namespace

PhaseDynamics build_phase_dynamics(const ModelParams& p, Phase phase) {
  p.validate();
  PhaseDynamics dyn;
  dyn.phase = phase;
  MatAug& a = dyn.generator;
  const double k1 = p.gravity / p.h1;
  const double k2 = p.gravity / p.h2;
  const double pelvis_torque = 1.0 / (p.pelvis_mass * p.h1);
  const double leg_torque = 1.0 / (p.leg_mass * p.h2);

  for (int ax = 0; ax < 2; ++ax) {
    const int pel = ix::pelvis + ax, sw = ix::swing + ax;
    const int pv = ix::pelvis_vel + ax, sv = ix::swing_vel + ax;
    const int st = ix::stance + ax;
    const int hip = ix::hip + ax, ank = ix::ankle + ax;
    const int rho_h = kRhoHip + ax, rho_a = kRhoAnkle + ax;

    a(pel, pv) = 1.0;
    a(pv, ix::force + ax) = 1.0 / p.pelvis_mass;
    a(pv, ix::torque + ax) = pelvis_torque;
    a(pv, ank) += pelvis_torque;
    a(pv, rho_a) += pelvis_torque;
    a(rho_h, ix::hip_ramp + ax) = 1.0;
    a(rho_a, ix::ankle_ramp + ax) = 1.0;

    if (phase == Phase::ss) {
      a(pv, pel) = k1;
      a(pv, st) = -k1;
      // Swing-hip reaction on the torso.
      a(pv, hip) -= pelvis_torque;
      a(pv, rho_h) -= pelvis_torque;
      a(sw, sv) = 1.0;
      a(sv, sw) = -k2;
      a(sv, pel) = k2;
      if (ax == ix::lat) a(sv, ix::side) = k2 * p.half_width;
      a(sv, hip) = leg_torque;
      a(sv, rho_h) = leg_torque;
    } else {
      // Both feet pinned; the pelvis falls about the feet midpoint.
      a(pv, pel) = k1;
      a(pv, st) = -0.5 * k1;
      a(pv, sw) = -0.5 * k1;
    }
  }
  return dyn;
}

}  // namespace tlp
