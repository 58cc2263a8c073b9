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
// Symmetric periodic gaits as null vectors of the stride symmetry operator.
#pragma once

#include <Eigen/Dense>

#include <vector>

#include "tlp/linmodel.hpp"

namespace tlp {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6x23 = Eigen::Matrix<double, 6, kDim>;

struct TransformConstants {
  Eigen::Matrix<double, 6, 8> M;  // local vectors relative to the pelvis
  Eigen::Matrix<double, 8, 8> T;  // swaps the two feet
  Mat6 O;                         // mirrors lateral components

  static const TransformConstants& get();
};

// R = -M S_XP + O M T S_XP H'
Mat6x23 symmetry_operator(const TransferMatrix& h_constrained);

// Entries a periodic gait may use: pelvis, swing foot, pelvis velocity,
// constant ankle torques and both ramp channels. Stance foot, disturbance,
// swing velocity and the dedicated hip channels are pinned.
const std::vector<int>& admissible_entries();

// Orthonormal null-space basis of R restricted to admissible entries, as
// columns in the full 23-entry layout.
Eigen::Matrix<double, kDim, Eigen::Dynamic> periodic_gaits(const Mat6x23& r);

enum class GaitClass { pseudo_passive, actuated };

struct PeriodicGait {
  Vec23 beta = Vec23::Zero();   // full nominal stride-start vector, side flag +1
  Vec23 side = Vec23::Zero();   // speed-independent part (pelvis-width sway)
  GaitTiming timing;
  double speed = 0.0;           // m/s
  GaitClass cls = GaitClass::pseudo_passive;
};

struct PseudoPassiveResult {
  double t_ss = 0.0;
  PeriodicGait gait;        // normalized to 1 m/s
  int sign_changes = 0;     // of the pole-free residual over the sweep
  int genuine_roots = 0;    // sign changes with a regular constraint and a nonzero step
};

// Sign-carrying residual whose roots are pseudo-passive timings:
// (constraint block entry) * det(sagittal 3x3 block of R). The factor removes
// the pole that the constraint elimination puts into R.
double pseudo_passive_residual(const ModelParams& params, double t_ds, double t_ss);

PseudoPassiveResult pseudo_passive_timing(const ModelParams& params, double t_ds,
                                          int steps_per_stride = 100, double lo = 0.05,
                                          double hi = 2.0);

// Periodic gait with hip-ramp actuation in the sagittal plane; at a
// pseudo-passive timing the actuation comes out zero.
PeriodicGait periodic_gait(const ModelParams& params, const GaitTiming& timing, double speed);

PeriodicGait scale_gait(const PeriodicGait& gait, double target_speed);

// Feet distance over stride time, measured on a stride-start state
// (stance foot ahead of the trailing foot).
double stride_speed(const Vec23& q_start, const GaitTiming& timing);

}  // namespace tlp
