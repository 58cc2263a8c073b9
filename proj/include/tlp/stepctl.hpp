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
// Stride-to-stride error dynamics and discrete LQR design.
#pragma once

#include <Eigen/Dense>

#include <string>

#include "tlp/gait.hpp"

namespace tlp {

using Mat6x2 = Eigen::Matrix<double, 6, 2>;
using Mat6x4 = Eigen::Matrix<double, 6, 4>;
using Mat2x6 = Eigen::Matrix<double, 2, 6>;

// e+ = ae e- + bu U' + bw W
struct ErrorSystem {
  Mat6 ae;
  Mat6x2 bu;
  Mat6x4 bw;
  Mat6 m1;
  Mat6x2 m2;
  Mat6x23 a;  // O M T S_XP H'
};

ErrorSystem build_error_system(const TransferMatrix& h_constrained);

// e = M S_XP (beta - x)
Vec6 error_vector(const Vec23& beta, const Vec23& x);

// Stride-start state whose error is e, with the given stance foot. Inputs
// and side come from beta; swing velocity and disturbance are zero.
Vec23 reconstruct_state(const Vec6& e, const Eigen::Vector2d& stance, const Vec23& beta);

enum class Variant { aggressive, normal, light };

double input_weight(Variant v);
std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct DareResult {
  Eigen::MatrixXd p;
  Eigen::MatrixXd k;
  int iterations = 0;
  double residual = 0.0;  // Frobenius norm of the Riccati residual over max(1, |P|)
};

// Structure-preserving doubling. Throws NumericalError when it fails to
// converge within max_iter doublings.
DareResult solve_dare(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& q,
                      const Eigen::MatrixXd& r, int max_iter = 10000);

struct FeedbackGain {
  Mat2x6 k = Mat2x6::Zero();
  Mat6 q = Mat6::Identity();
  Eigen::Matrix2d r = Eigen::Matrix2d::Identity();
  Variant variant = Variant::aggressive;
  Eigen::VectorXcd closed_loop_eigenvalues;
  double spectral_radius = 0.0;
};

FeedbackGain design_gain(const ErrorSystem& es, Variant v);

double spectral_radius(const Eigen::MatrixXd& m);

// U' = -K e-, to be added to the ramp hip channels for the whole stride.
Eigen::Vector2d dlqr_correction(const Mat2x6& k, const Vec23& beta, const Vec23& x_event);

// Stride inputs: nominal torques from beta with U' added to the ramp hip
// channels. Constant hip channels are left to the foot constraint.
Vec23 dlqr_step(const Mat2x6& k, const Vec23& beta, const Vec23& x_event);

}  // namespace tlp
