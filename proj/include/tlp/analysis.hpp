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
// Closed-loop eigenvalues, push-timing surfaces and controllable regions.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

#include "tlp/ctpc.hpp"

namespace tlp {

// ---------------------------------------------------------------- eigen

struct ClosedLoopMap {
  Mat6 map = Mat6::Zero();
  Eigen::VectorXcd eigenvalues;  // descending magnitude
  double spectral_radius = 0.0;
  double superposition_residual = 0.0;
};

// Probes e -> e after n_strides with six unit errors and checks linearity on a
// random combination; throws NumericalError when superposition fails.
ClosedLoopMap closed_loop_map(std::shared_ptr<const ControlGrid> grid, const PeriodicGait& gait,
                              const Controller& ctrl, int n_strides = 2);

struct EigenReport {
  double frequency = 0.0;
  std::string tag;
  Eigen::VectorXcd eigenvalues;
  double spectral_radius = 0.0;
  // Largest mismatch between sagittal and lateral eigenvalue sets.
  double duplicate_gap = 0.0;
  bool all_real = false;
};

// Periodic gait at zero speed: only the lateral sway remains. The error
// dynamics do not depend on the nominal gait, so sweeps use this one.
PeriodicGait standing_gait(const ModelParams& params, const GaitTiming& timing);

std::vector<EigenReport> eigen_sweep(const ModelParams& params, const std::vector<double>& frequencies,
                                     const std::vector<ControllerSpec>& controllers, double ds_fraction = 0.2,
                                     int steps_per_stride = 100);

// ---------------------------------------------------------------- surfaces

struct PushSurface {
  std::vector<double> starts;  // fractions of the stride
  std::vector<double> ends;
  Eigen::Vector4d push = Eigen::Vector4d::Zero();
  // err[k](i, j): touch-down error norm after stride k for starts[i], ends[j];
  // zero where the window is empty, saturated at the divergence norm.
  std::array<Eigen::MatrixXd, 3> err;
};

// Push active during the first stride on grid indices [index_at(start T), index_at(end T)).
PushSurface push_response_surface(std::shared_ptr<const ControlGrid> grid, const PeriodicGait& gait,
                                  const Controller& ctrl, const std::vector<double>& starts,
                                  const std::vector<double>& ends, const Eigen::Vector4d& push);

// ---------------------------------------------------------------- regions

struct LpResult {
  enum class Status { optimal, unbounded } status = Status::optimal;
  Eigen::VectorXd x;
  double value = 0.0;
  int pivots = 0;
};

// max c'x subject to A x <= b, x >= 0, with b >= 0 so the origin is a vertex.
LpResult simplex_maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                          double tol = 1e-9);

struct RegionConstraints {
  double hip_torque_limit = 80.0;      // N m, each axis, at every sample
  double diamond_half_diagonal = 0.85; // m, next footstep around the stance foot
  int horizon = 10;                    // strides
  int samples_per_stride = 3;          // policy updates and torque samples
  // Bound the torque change against the nominal gait instead of the total.
  bool torque_about_nominal = true;
};

enum class RegionKind { dlqr, ctpc, maximal };

struct RegionSlice {
  std::array<int, 2> subspace{2, 4};
  std::vector<Eigen::Vector2d> rays;      // farthest feasible point per ray
  std::vector<Eigen::Vector2d> vertices;  // convex hull, counter-clockwise
  double area = 0.0;
  int horizon = 0;
  int samples_per_stride = 0;
  std::string tag;
  int capped_rays = 0;  // rays whose program was unbounded
};

// Projection of the recoverable initial-error set onto two error coordinates;
// the other four coordinates are free. Controllers run with sampled updates.
RegionSlice controllable_region(std::shared_ptr<const ControlGrid> grid, const PeriodicGait& gait,
                                const Controller& ctrl, std::array<int, 2> subspace,
                                const RegionConstraints& cons = {}, int rays = 64);

// Same constraints with the ramp-hip inputs free per sample segment.
// Internally the free inputs are added to a stabilizing stride feedback.
RegionSlice maximal_region(std::shared_ptr<const ControlGrid> grid, const PeriodicGait& gait,
                           std::array<int, 2> subspace, const RegionConstraints& cons = {}, int rays = 64);

std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts);
double polygon_area(const std::vector<Eigen::Vector2d>& poly);
// Point inside a counter-clockwise convex polygon, with outward slack.
bool polygon_contains(const std::vector<Eigen::Vector2d>& poly, const Eigen::Vector2d& p, double slack);

}  // namespace tlp
