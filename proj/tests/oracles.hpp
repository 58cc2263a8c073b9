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
// Test oracles that share no code with the library: a fixed-step RK4
// integrator written straight from the equations of motion, plus helpers.
#pragma once

#include <random>

#include "tlp/linmodel.hpp"

namespace oracle {

using tlp::Vec23;

// Right-hand side with ramp torques evaluated explicitly at phase time tau.
inline Vec23 rhs(const tlp::ModelParams& p, tlp::Phase phase, const Vec23& q, double tau) {
  Vec23 dq = Vec23::Zero();
  for (int ax = 0; ax < 2; ++ax) {
    const double pel = q(0 + ax), sw = q(2 + ax), pv = q(4 + ax), sv = q(6 + ax), st = q(8 + ax);
    const double hip = q(10 + ax) + q(14 + ax) * tau;
    const double ankle = q(12 + ax) + q(16 + ax) * tau;
    const double force = q(18 + ax), torque = q(20 + ax);
    const double ext = force / p.pelvis_mass + torque / (p.pelvis_mass * p.h1);
    dq(0 + ax) = pv;
    if (phase == tlp::Phase::ss) {
      dq(4 + ax) = p.gravity / p.h1 * (pel - st) + (ankle - hip) / (p.pelvis_mass * p.h1) + ext;
      const double offset = ax == 1 ? q(22) * p.half_width : 0.0;
      dq(2 + ax) = sv;
      dq(6 + ax) = -p.gravity / p.h2 * (sw - pel - offset) + hip / (p.leg_mass * p.h2);
    } else {
      dq(4 + ax) = p.gravity / p.h1 * (pel - 0.5 * (sw + st)) + ankle / (p.pelvis_mass * p.h1) + ext;
    }
  }
  return dq;
}

// Integrate over [tau0, tau0 + duration] of one phase with step h.
inline Vec23 integrate(const tlp::ModelParams& p, tlp::Phase phase, Vec23 q, double tau0, double duration,
                       double h = 1e-5) {
  const int n = static_cast<int>(std::ceil(duration / h - 1e-9));
  const double dt = duration / n;
  double tau = tau0;
  for (int i = 0; i < n; ++i) {
    const Vec23 k1 = rhs(p, phase, q, tau);
    const Vec23 k2 = rhs(p, phase, q + 0.5 * dt * k1, tau + 0.5 * dt);
    const Vec23 k3 = rhs(p, phase, q + 0.5 * dt * k2, tau + 0.5 * dt);
    const Vec23 k4 = rhs(p, phase, q + dt * k3, tau + dt);
    q += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    tau += dt;
  }
  return q;
}

inline Vec23 random_state(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vec23 q;
  for (int i = 0; i < tlp::kDim; ++i) q(i) = u(rng);
  q(22) = (rng() & 1U) ? 1.0 : -1.0;
  // Torques and forces at realistic magnitudes.
  for (int i = 10; i < 22; ++i) q(i) *= 20.0;
  return q;
}

inline double rel_err(const Vec23& a, const Vec23& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace oracle
