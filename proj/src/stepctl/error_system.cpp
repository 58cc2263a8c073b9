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
#include "tlp/stepctl.hpp"

namespace tlp {

ErrorSystem build_error_system(const TransferMatrix& hc) {
  const auto& k = TransformConstants::get();
  ErrorSystem es;
  es.m1 = k.M.leftCols<6>();
  es.m2 = k.M.rightCols<2>();
  const Eigen::FullPivLU<Mat6> lu(es.m1);
  if (!lu.isInvertible()) throw NumericalError("local transform block is singular");
  es.a = k.O * k.M * k.T * Sel::matrix(Sel::xp) * hc.m;
  const Eigen::Matrix<double, kDim, 6> b = Sel::matrix(Sel::x).transpose() * lu.inverse();
  es.ae = es.a * b;
  es.bu = -es.a(Eigen::all, Sel::hip_ramp);
  es.bw = -es.a(Eigen::all, Sel::w);
  return es;
}

Vec6 error_vector(const Vec23& beta, const Vec23& x) {
  const auto& k = TransformConstants::get();
  const Vec23 d = beta - x;
  return k.M * d(Sel::xp);
}

Vec23 reconstruct_state(const Vec6& e, const Eigen::Vector2d& stance, const Vec23& beta) {
  const auto& k = TransformConstants::get();
  const Mat6 m1 = k.M.leftCols<6>();
  const Mat6x2 m2 = k.M.rightCols<2>();
  const Eigen::Vector2d dp = beta.segment<2>(ix::stance) - stance;
  const Vec6 xb = beta(Sel::x);
  Vec23 q = beta;
  q(Sel::x) = xb - m1.fullPivLu().solve(e - m2 * dp);
  q.segment<2>(ix::stance) = stance;
  q.segment<2>(ix::swing_vel).setZero();
  q.segment<4>(ix::force).setZero();
  return q;
}

double input_weight(Variant v) {
  switch (v) {
    case Variant::aggressive: return 0.01;
    case Variant::normal: return 1.0;
    case Variant::light: return 100.0;
  }
  return 1.0;
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::aggressive: return "aggressive";
    case Variant::normal: return "normal";
    case Variant::light: return "light";
  }
  return "normal";
}

Variant variant_from_name(const std::string& name) {
  if (name == "aggressive") return Variant::aggressive;
  if (name == "normal") return Variant::normal;
  if (name == "light") return Variant::light;
  throw ConfigError("unknown DLQR variant: " + name);
}

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues().cwiseAbs().maxCoeff();
}

FeedbackGain design_gain(const ErrorSystem& es, Variant v) {
  FeedbackGain g;
  g.variant = v;
  g.q = Mat6::Identity();
  g.r = input_weight(v) * Eigen::Matrix2d::Identity();
  const DareResult d = solve_dare(es.ae, es.bu, g.q, g.r);
  g.k = d.k;
  const Mat6 cl = es.ae - es.bu * g.k;
  g.closed_loop_eigenvalues = Eigen::EigenSolver<Mat6>(cl, false).eigenvalues();
  g.spectral_radius = g.closed_loop_eigenvalues.cwiseAbs().maxCoeff();
  return g;
}

Eigen::Vector2d dlqr_correction(const Mat2x6& k, const Vec23& beta, const Vec23& x_event) {
  return -k * error_vector(beta, x_event);
}

Vec23 dlqr_step(const Mat2x6& k, const Vec23& beta, const Vec23& x_event) {
  Vec23 q = x_event;
  q.segment<4>(ix::hip) = beta.segment<4>(ix::hip);
  q.segment<4>(ix::hip_ramp) = beta.segment<4>(ix::hip_ramp);
  q.segment<2>(ix::hip_ramp) += dlqr_correction(k, beta, x_event);
  return q;
}

}  // namespace tlp
