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
// Linear three-mass walking template: state layout, per-phase generators,
// closed-form transfer matrices and the zero-foot-velocity elimination.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tlp/errors.hpp"

namespace tlp {

inline constexpr int kDim = 23;
// Canonical entries plus one integrator per ramp-torque channel.
inline constexpr int kAugDim = 27;

using Vec23 = Eigen::Matrix<double, kDim, 1>;
using Mat23 = Eigen::Matrix<double, kDim, kDim>;
using MatAug = Eigen::Matrix<double, kAugDim, kAugDim>;

// Offsets of each 2-vector (sagittal at +0, lateral at +1) inside Q.
namespace ix {
inline constexpr int pelvis = 0;
inline constexpr int swing = 2;
inline constexpr int pelvis_vel = 4;
inline constexpr int swing_vel = 6;
inline constexpr int stance = 8;
inline constexpr int hip = 10;
inline constexpr int ankle = 12;
inline constexpr int hip_ramp = 14;
inline constexpr int ankle_ramp = 16;
inline constexpr int force = 18;
inline constexpr int torque = 20;
inline constexpr int side = 22;
inline constexpr int sag = 0;
inline constexpr int lat = 1;
}  // namespace ix

// Row selectors. Index order matters: it fixes the column order that the
// transform matrix M of the gait module expects.
struct Sel {
  static constexpr std::array<int, 8> xp{2, 3, 0, 1, 4, 5, 8, 9};
  static constexpr std::array<int, 6> x{2, 3, 0, 1, 4, 5};
  static constexpr std::array<int, 8> x8{2, 3, 0, 1, 4, 5, 6, 7};
  static constexpr std::array<int, 2> swing_vel{6, 7};
  static constexpr std::array<int, 2> hip_const{10, 11};
  static constexpr std::array<int, 2> hip_ramp{14, 15};
  static constexpr std::array<int, 2> stance{8, 9};
  static constexpr std::array<int, 4> inputs_const{10, 11, 12, 13};
  static constexpr std::array<int, 4> inputs_ramp{14, 15, 16, 17};
  static constexpr std::array<int, 4> w{18, 19, 20, 21};
  // Stance foot, nominal torques, nominal ramps, side flag.
  static constexpr std::array<int, 11> z{8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 22};
  // Lateral positions and velocities; mirrored when the legs swap.
  static constexpr std::array<int, 5> lateral{1, 3, 5, 7, 9};

  template <std::size_t N>
  static Eigen::Matrix<double, static_cast<int>(N), kDim> matrix(const std::array<int, N>& rows) {
    Eigen::Matrix<double, static_cast<int>(N), kDim> s =
        Eigen::Matrix<double, static_cast<int>(N), kDim>::Zero();
    for (std::size_t i = 0; i < N; ++i) s(static_cast<int>(i), rows[i]) = 1.0;
    return s;
  }
};

enum class Preset { adult, kid, custom };

struct ModelParams {
  double pelvis_mass = 50.0;  // kg
  double leg_mass = 10.0;     // kg, each leg
  double h1 = 0.9;            // pelvis height, m
  double h2 = 0.5;            // leg CoM distance below the hip, m
  double half_width = 0.1;    // m
  double leg_length = 0.9;    // m
  double gravity = 9.81;      // m/s^2
  Preset preset = Preset::adult;

  static ModelParams adult();
  static ModelParams kid();
  void validate() const;
};

std::string preset_name(Preset p);
Preset preset_from_name(const std::string& name);

enum class Phase { ds, ss };

// Fixed timing tiled into per-phase step counts. Each phase has its own dt so
// both phase lengths are integer multiples of their step.
struct GaitTiming {
  double t_ds = 0.1;
  double t_ss = 0.8;
  int n_ds = 11;
  int n_ss = 89;

  static GaitTiming make(double t_ds, double t_ss, int steps_per_stride = 100);
  // frequency in step/s; one stride is one step (double + single support).
  static GaitTiming from_frequency(double freq, double ds_fraction, int steps_per_stride = 100);

  double stride() const { return t_ds + t_ss; }
  int steps() const { return n_ds + n_ss; }
  double dt_ds() const { return n_ds > 0 ? t_ds / n_ds : 0.0; }
  double dt_ss() const { return n_ss > 0 ? t_ss / n_ss : 0.0; }
  Phase phase_at(int j) const { return j < n_ds ? Phase::ds : Phase::ss; }
  double dt_at(int j) const { return j < n_ds ? dt_ds() : dt_ss(); }
  // Time since the start of the current phase at grid index j.
  double offset_at(int j) const { return j < n_ds ? j * dt_ds() : (j - n_ds) * dt_ss(); }
  double time_at(int j) const { return j < n_ds ? offset_at(j) : t_ds + offset_at(j); }
  // First grid index whose time is >= t (steps() if t >= stride).
  int index_at(double t) const;
  void validate() const;
};

struct PhaseDynamics {
  Phase phase = Phase::ss;
  MatAug generator = MatAug::Zero();
};

enum class Span { ds, ss, composed };

struct TransferMatrix {
  Mat23 m = Mat23::Identity();
  double t_from = 0.0;
  double t_to = 0.0;
  Span tag = Span::composed;
  bool constrained = false;
};

PhaseDynamics build_phase_dynamics(const ModelParams& params, Phase phase);

// Exact flow of a phase over duration t. Ramp torques restart with every
// phase; ramp_offset is the time already spent in the phase, so the ramp
// integrators start at ramp_offset * rU.
TransferMatrix transfer_matrix(const PhaseDynamics& dyn, double t, double ramp_offset = 0.0);

TransferMatrix stride_transfer(const ModelParams& params, const GaitTiming& timing);
// H(t): map from the stride start to time t in [0, T_stride].
TransferMatrix partial_transfer(const ModelParams& params, const GaitTiming& timing, double t);
// Map from time t in [0, T_stride) to the stride end.
TransferMatrix remaining_transfer(const ModelParams& params, const GaitTiming& timing, double t);
std::vector<TransferMatrix> step_matrices(const ModelParams& params, const GaitTiming& timing);

// 2x2 response of end-of-stride swing velocity to the constant hip channels.
Eigen::Matrix2d constraint_block(const Mat23& h);
// Scaled condition: size of the swing-velocity rows over the smallest singular
// value of the block. The block is diagonal, so its plain condition number
// hides exact singularity; this measure does not.
double constraint_condition(const Mat23& h);
inline constexpr double kConstraintCondLimit = 1e12;

TransferMatrix constrain_foot_velocity(const TransferMatrix& h);

// Immutable per-(model, timing) cache of every matrix the controllers need.
class StrideGrid {
 public:
  StrideGrid(const ModelParams& params, const GaitTiming& timing);

  const ModelParams& params() const { return params_; }
  const GaitTiming& timing() const { return timing_; }
  int steps() const { return timing_.steps(); }
  const TransferMatrix& stride() const { return stride_; }
  const TransferMatrix& stride_constrained() const { return stride_c_; }
  const TransferMatrix& step(int j) const { return steps_[j]; }
  const TransferMatrix& remaining(int j) const { return remaining_[j]; }
  // Empty where the dedicated channels cannot stop the foot.
  const std::optional<TransferMatrix>& remaining_constrained(int j) const { return remaining_c_[j]; }
  double remaining_condition(int j) const { return remaining_cond_[j]; }

 private:
  ModelParams params_;
  GaitTiming timing_;
  TransferMatrix stride_;
  TransferMatrix stride_c_;
  std::vector<TransferMatrix> steps_;
  std::vector<TransferMatrix> remaining_;
  std::vector<std::optional<TransferMatrix>> remaining_c_;
  std::vector<double> remaining_cond_;
};

// Swap legs at touch-down: the swing foot becomes the stance foot, the old
// stance foot becomes the trailing foot, and lateral axes are mirrored so the
// next stride is expressed in the same canonical frame.
Vec23 relabel_at_touchdown(const Vec23& q);

}  // namespace tlp
