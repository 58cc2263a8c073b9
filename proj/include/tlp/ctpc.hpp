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
// Per-time-step control: disturbance observer, foot-velocity constraint
// torques, the time-projecting policy, and the walking episode that ties
// them to the plant.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tlp/stepctl.hpp"

namespace tlp {

using Mat16 = Eigen::Matrix<double, 16, 16>;
using Vec16 = Eigen::Matrix<double, 16, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Vec11 = Eigen::Matrix<double, 11, 1>;

// ---------------------------------------------------------------- config

enum class Category { c1, c2, c3, c4 };

struct ProjectionConfig {
  std::array<int, 12> d{};

  // Twelve binary digits, d1 first; spaces and underscores are ignored.
  static ProjectionConfig parse(const std::string& flags);
  // Bit 11 of index is d1, bit 0 is d12; index order equals string order.
  static ProjectionConfig from_index(int index);
  // "C1".."C4" or a flag string.
  static ProjectionConfig named(const std::string& name);

  int index() const;
  std::string str() const;
  int alternative_count() const { return (d[2] != 0 || d[3] != 0) ? 2 : 1; }
};

Category category_of(int alternative_count, bool constant_input);
std::string category_name(Category c);

// ---------------------------------------------------------------- observer

struct ObserverState {
  Eigen::Vector4d w_est = Eigen::Vector4d::Zero();
  Vec23 residual = Vec23::Zero();
  int rank = 0;
  double condition = 0.0;
};

// Least-squares disturbance estimate from one step's prediction mismatch.
// Force and torque columns are collinear in this model, so the estimate is
// the minimum-norm one; only a zero block is reported as degenerate.
ObserverState observe_disturbance(const Vec23& q_prev, const Vec23& q_now, const Mat23& g_step);

// Constant swing-hip torques that stop the swing foot at stride end, with the
// current disturbance estimate held constant.
Eigen::Vector2d constraint_hip_torque(const Vec23& q_now, const Eigen::Vector4d& w_est,
                                      const Mat23& g_remaining);

// Per-grid caches for the observer and the constraint solve, shared by every
// episode that runs on the same model and timing.
class ControlGrid {
 public:
  ControlGrid(const ModelParams& params, const GaitTiming& timing);
  explicit ControlGrid(std::shared_ptr<const StrideGrid> model);

  const StrideGrid& model() const { return *model_; }
  std::shared_ptr<const StrideGrid> model_ptr() const { return model_; }
  const GaitTiming& timing() const { return model_->timing(); }
  int steps() const { return model_->steps(); }

  // W estimate = observer_gain(j) * (q_now - G_j q_prev with W = 0).
  const Eigen::Matrix<double, 4, kDim>& observer_gain(int j) const { return obs_[j]; }
  // Constraint torque = -constraint_gain(j) * q, with q carrying W_est.
  const Eigen::Matrix<double, 2, kDim>& constraint_gain(int j) const { return cg_[j]; }
  bool constraint_valid(int j) const { return cvalid_[j]; }

 private:
  void build();
  std::shared_ptr<const StrideGrid> model_;
  std::vector<Eigen::Matrix<double, 4, kDim>> obs_;
  std::vector<Eigen::Matrix<double, 2, kDim>> cg_;
  std::vector<bool> cvalid_;
};

// ---------------------------------------------------------------- projection

struct ProjectionBlocks {
  Mat6 h1;
  Mat6x2 h2;
  Mat6x4 h3;
  Eigen::Matrix<double, 6, 11> h4;
  Eigen::Matrix<double, 6, 8> g1;
  Mat6x2 g2;
  Mat6x4 g3;
  Eigen::Matrix<double, 6, 11> g4;
  Mat2x6 d1;
  Eigen::Vector2d d2;
  Eigen::Matrix2d d3;
};

ProjectionBlocks make_blocks(const Mat23& h_constrained, const Mat23& g_constrained, const Mat2x6& k,
                             const Vec23& beta);

Mat16 assemble_matrix(const ProjectionConfig& cfg, const ProjectionBlocks& b);
Vec16 assemble_rhs(const ProjectionConfig& cfg, const ProjectionBlocks& b, const Vec8& xt,
                   const Eigen::Vector4d& w, const Vec11& z, const Eigen::Vector2d& p);

// Z: actual stance foot, nominal torques and ramps from beta, side flag.
Vec11 projection_z(const Vec23& q, const Vec23& beta);

struct PolicyResult {
  Eigen::Vector2d u1 = Eigen::Vector2d::Zero();
  Vec6 x1 = Vec6::Zero();
  Vec6 x2 = Vec6::Zero();
  Eigen::Vector2d u2 = Eigen::Vector2d::Zero();
  double condition = 0.0;
  bool ok = false;
};

inline constexpr double kProjectionCondLimit = 1e12;

// Time-projecting policy bound to one model grid, gain and configuration.
// The 16x16 matrix depends only on the grid index, so its factorization is
// cached; per call only the right-hand side changes.
class CtpcPolicy {
 public:
  CtpcPolicy(std::shared_ptr<const StrideGrid> grid, const Mat2x6& k, const ProjectionConfig& cfg);

  PolicyResult solve(int j, const Vec23& q, const Eigen::Vector4d& w_est, const Vec23& beta) const;
  // Assemble and factor from scratch; same answer as solve().
  PolicyResult solve_uncached(int j, const Vec23& q, const Eigen::Vector4d& w_est, const Vec23& beta) const;

  const ProjectionConfig& config() const { return cfg_; }
  const Mat2x6& gain() const { return k_; }
  const StrideGrid& grid() const { return *grid_; }

 private:
  std::shared_ptr<const StrideGrid> grid_;
  Mat2x6 k_;
  ProjectionConfig cfg_;
  std::vector<ProjectionBlocks> blocks_;  // beta-independent parts
  std::vector<Eigen::PartialPivLU<Mat16>> lu_;
  std::vector<double> cond_;
  std::vector<bool> valid_;
};

// ---------------------------------------------------------------- episode

enum class ControllerKind { open_loop, dlqr, ctpc };

struct Controller {
  ControllerKind kind = ControllerKind::open_loop;
  Mat2x6 k = Mat2x6::Zero();
  std::shared_ptr<const CtpcPolicy> policy;  // set for ctpc
  std::string tag = "open";
  // Policy solves per stride, evenly spaced from j = 0, inputs held between
  // them; 0 solves at every step.
  int updates_per_stride = 0;
  // Open loop and DLQR: extra ramp-hip input per (stride, grid index), added
  // to the once-per-stride correction.
  std::function<Eigen::Vector2d(int, int)> feedforward;
};

// Declarative controller choice, resolvable against any grid.
struct ControllerSpec {
  ControllerKind kind = ControllerKind::ctpc;
  Variant variant = Variant::aggressive;
  ProjectionConfig cfg = ProjectionConfig::named("C1");
  int updates_per_stride = 0;

  // "open", "dlqr-<variant>", "ctpc-<C1..C4|flags>-<variant>".
  static ControllerSpec parse(const std::string& tag);
  std::string tag() const;
};

// Designs the DLQR gain on the grid's constrained stride map when needed.
Controller make_controller(const ControllerSpec& spec, std::shared_ptr<const StrideGrid> grid);

// True when grid index j is one of the evenly spaced update points.
bool is_update_step(int j, int updates_per_stride, int steps);

Controller make_open_loop();
Controller make_dlqr(const FeedbackGain& gain);
Controller make_ctpc(std::shared_ptr<const StrideGrid> grid, const FeedbackGain& gain,
                     const ProjectionConfig& cfg, const std::string& tag = "");

struct StepRecord {
  int stride = 0;
  int j = 0;
  double time = 0.0;  // absolute, s
  Vec23 q = Vec23::Zero();
  Vec6 e = Vec6::Zero();  // error at the start of this stride
  Eigen::Vector2d u_extra = Eigen::Vector2d::Zero();       // U' (DLQR) or U1 (CTPC)
  Eigen::Vector2d u_constraint = Eigen::Vector2d::Zero();  // dedicated hip channels
  Eigen::Vector4d w_est = Eigen::Vector4d::Zero();
  Eigen::Vector4d w_true = Eigen::Vector4d::Zero();         // canonical frame
  bool held = false;  // a singular solve fell back on the previous input
};

struct StrideRecord {
  int stride = 0;
  Vec6 e = Vec6::Zero();  // touch-down error against the gait of this stride
  double error_norm = 0.0;
  double speed = 0.0;
  double input_cost = 0.0;  // mean over steps of u_extra' R u_extra with R = I
  bool diverged = false;
};

// World-frame disturbance as a function of (stride, grid index, absolute time).
using PushFn = std::function<Eigen::Vector4d(int, int, double)>;
Eigen::Vector4d no_push(int, int, double);

inline constexpr double kDivergenceNorm = 1e6;

class Episode {
 public:
  Episode(std::shared_ptr<const ControlGrid> grid, const PeriodicGait& gait, Controller ctrl);
  // Start from an explicit stride-start state instead of the gait itself.
  Episode(std::shared_ptr<const ControlGrid> grid, const PeriodicGait& gait, Controller ctrl,
          const Vec23& start);

  // New nominal gait from the next stride on.
  void set_gait(const PeriodicGait& gait) { gait_ = gait; }
  const PeriodicGait& gait() const { return gait_; }

  StrideRecord run_stride(const PushFn& push, std::vector<StepRecord>* log = nullptr);

  const Vec23& state() const { return q_; }
  int stride_index() const { return stride_; }
  // +1 while the canonical lateral axis matches the world, -1 otherwise.
  int parity() const { return parity_; }
  bool diverged() const { return diverged_; }

 private:
  std::shared_ptr<const ControlGrid> grid_;
  PeriodicGait gait_;
  Controller ctrl_;
  Vec23 q_;
  Eigen::Vector4d w_est_ = Eigen::Vector4d::Zero();
  Eigen::Vector2d last_u1_ = Eigen::Vector2d::Zero();
  Eigen::Vector2d last_uc_ = Eigen::Vector2d::Zero();
  int stride_ = 0;
  int parity_ = 1;
  bool diverged_ = false;
};

// Maximum U1 variation over one stride under (a) a perturbed start and (b) a
// constant disturbance switched on mid-stride.
struct ConstantInputReport {
  double variation_initial = 0.0;
  double variation_push = 0.0;
  bool constant = false;
};

ConstantInputReport is_constant_input(std::shared_ptr<const ControlGrid> grid, const FeedbackGain& gain,
                                      const ProjectionConfig& cfg, const PeriodicGait& gait,
                                      double threshold = 1e-6);

}  // namespace tlp
